//! Derivation scripts: the ordered list of steps that produce a verdict for
//! every table lattice.
//!
//! One step per line:
//!
//! ```text
//! step <kind> lattice=<expr> [key=value ...]
//! ```
//!
//! Blank lines and `#` comments are ignored. Keys by kind:
//!
//! | kind | keys |
//! |---|---|
//! | `vinberg_direct` | run keys, `expect_roots`, `expect_status` |
//! | `chirality_complete`, `extended_group` | run keys |
//! | `achirality_symmetry` | run keys, `sigma=auto` or `sigma=a:b,c,...` |
//! | `rootless` | none |
//! | `extension` | `base`, `summand` |
//! | `descent` | `larger`, `summand` |
//! | `reduction` | `from`, `j=a,b,...` |
//!
//! Run keys are `max_level`, `max_roots`, `squares=2,6` and `volume=on|off`.
//! `base`, `larger` and `from` must name the lattice of an earlier
//! certificate-producing step.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::certificate::{
    achirality_certificate, chirality_proof, descent_step, extended_group_chirality, extension_step, reduction_step,
    reversing_symmetry, rootless_certificate, symmetry_on_subset, Certificate,
};
use crate::error::{Error, Result};
use crate::expr::parse_lattice_expr;
use crate::lattice::Lattice;
use crate::linalg::Rat;
use crate::roots::{run_vinberg, RootConfig, RootSequence};

pub const BUILTIN_SCRIPT: &str = include_str!("../data/derivation.script");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    VinbergDirect,
    AchiralitySymmetry,
    ChiralityComplete,
    Extension,
    Descent,
    Reduction,
    ExtendedGroup,
    Rootless,
}

impl StepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepKind::VinbergDirect => "vinberg_direct",
            StepKind::AchiralitySymmetry => "achirality_symmetry",
            StepKind::ChiralityComplete => "chirality_complete",
            StepKind::Extension => "extension",
            StepKind::Descent => "descent",
            StepKind::Reduction => "reduction",
            StepKind::ExtendedGroup => "extended_group",
            StepKind::Rootless => "rootless",
        }
    }

    fn keys(&self) -> &'static [&'static str] {
        const RUN: &[&str] = &["max_level", "max_roots", "squares", "volume"];
        match self {
            StepKind::VinbergDirect => &["max_level", "max_roots", "squares", "volume", "expect_roots", "expect_status"],
            StepKind::AchiralitySymmetry => &["max_level", "max_roots", "squares", "volume", "sigma"],
            StepKind::ChiralityComplete | StepKind::ExtendedGroup => RUN,
            StepKind::Rootless => &[],
            StepKind::Extension => &["base", "summand"],
            StepKind::Descent => &["larger", "summand"],
            StepKind::Reduction => &["from", "j"],
        }
    }

    fn required(&self) -> &'static [&'static str] {
        match self {
            StepKind::AchiralitySymmetry => &["sigma"],
            StepKind::Extension => &["base", "summand"],
            StepKind::Descent => &["larger", "summand"],
            StepKind::Reduction => &["from", "j"],
            _ => &[],
        }
    }

    fn default_squares(&self) -> &'static [i64] {
        match self {
            StepKind::ExtendedGroup => &[2, 4, 6],
            _ => &[2, 6],
        }
    }

    pub fn produces_certificate(&self) -> bool {
        *self != StepKind::VinbergDirect
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StepKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "vinberg_direct" => StepKind::VinbergDirect,
            "achirality_symmetry" => StepKind::AchiralitySymmetry,
            "chirality_complete" => StepKind::ChiralityComplete,
            "extension" => StepKind::Extension,
            "descent" => StepKind::Descent,
            "reduction" => StepKind::Reduction,
            "extended_group" => StepKind::ExtendedGroup,
            "rootless" => StepKind::Rootless,
            other => return Err(format!("unknown step kind `{other}`")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub line: usize,
    pub kind: StepKind,
    /// Canonical expression.
    pub lattice: String,
    pub params: BTreeMap<String, String>,
}

impl Step {
    fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Script { line: self.line, msg: msg.into() }
    }

    /// Lattices whose certificates this step consumes.
    pub fn inputs(&self) -> Vec<&str> {
        ["base", "larger", "from"].iter().filter_map(|k| self.param(k)).collect()
    }

    fn run_config(&self, l: &Lattice) -> Result<RootConfig> {
        let mut c = RootConfig::new(l)?.with_squares(self.kind.default_squares());
        if let Some(v) = self.param("max_level") {
            c.max_level = v.parse::<Rat>().map_err(|_| self.err(format!("bad max_level `{v}`")))?;
        }
        if let Some(v) = self.param("max_roots") {
            c.max_roots = v.parse().map_err(|_| self.err(format!("bad max_roots `{v}`")))?;
        }
        if let Some(v) = self.param("squares") {
            let sq = v
                .split(',')
                .map(|s| s.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| self.err(format!("bad squares `{v}`")))?;
            c.allowed_squares = sq;
        }
        if let Some(v) = self.param("volume") {
            c.check_volume = match v {
                "on" => true,
                "off" => false,
                _ => return Err(self.err(format!("volume must be on or off, not `{v}`"))),
            };
        }
        c.validate(l)?;
        Ok(c)
    }

    fn run(&self, l: &Lattice) -> Result<RootSequence> {
        run_vinberg(l, &self.run_config(l)?)
    }

    fn sigma_pairs(&self) -> Option<Vec<(String, String)>> {
        let v = self.param("sigma")?;
        if v == "auto" {
            return None;
        }
        Some(
            v.split(',')
                .map(|p| match p.split_once(':') {
                    Some((a, b)) => (a.trim().to_string(), b.trim().to_string()),
                    None => (p.trim().to_string(), p.trim().to_string()),
                })
                .collect(),
        )
    }

    /// Performs the step, given the certificates of its inputs.
    pub fn perform(&self, inputs: &HashMap<String, Certificate>) -> Result<Option<Certificate>> {
        let input = |key: &str| -> Result<Certificate> {
            let name = self.param(key).ok_or_else(|| self.err(format!("missing `{key}`")))?;
            inputs.get(name).cloned().ok_or_else(|| self.err(format!("no certificate for {name}")))
        };
        let l = Lattice::from_expr(&self.lattice)?;
        let expr = self.lattice.as_str();
        let cert = match self.kind {
            StepKind::VinbergDirect => {
                let seq = self.run(&l)?;
                if let Some(n) = self.param("expect_roots") {
                    let n: usize = n.parse().map_err(|_| self.err(format!("bad expect_roots `{n}`")))?;
                    if seq.roots.len() != n {
                        return Err(self.err(format!("{} roots, expected {n}", seq.roots.len())));
                    }
                }
                if let Some(s) = self.param("expect_status") {
                    if seq.status.to_string() != s {
                        return Err(self.err(format!("run ended {}, expected {s}", seq.status)));
                    }
                }
                return Ok(None);
            }
            StepKind::ChiralityComplete => chirality_proof(&l, expr, &self.run(&l)?)?,
            StepKind::ExtendedGroup => extended_group_chirality(&l, expr, &self.run(&l)?)?,
            StepKind::AchiralitySymmetry => {
                let seq = self.run(&l)?;
                match self.sigma_pairs() {
                    None => {
                        let s = reversing_symmetry(&l, &seq)?
                            .ok_or_else(|| self.err("no graph symmetry reverses discr_3"))?;
                        let pick: Vec<usize> = (0..seq.roots.len()).collect();
                        achirality_certificate(&l, expr, &seq, &pick, &s)?
                    }
                    Some(pairs) => {
                        let (pick, s) = symmetry_on_subset(&seq, &pairs)?;
                        achirality_certificate(&l, expr, &seq, &pick, &s)?
                    }
                }
            }
            StepKind::Rootless => {
                let p = RootConfig::new(&l)?.base_point;
                rootless_certificate(&l, expr, None, &p)?
            }
            StepKind::Extension => extension_step(input("base")?, self.param("summand").unwrap_or_default(), expr)?,
            StepKind::Descent => descent_step(input("larger")?, self.param("summand").unwrap_or_default(), expr)?,
            StepKind::Reduction => {
                let j: Vec<String> = self.param("j").unwrap_or_default().split(',').map(|s| s.trim().to_string()).collect();
                reduction_step(input("from")?, &j, expr)?
            }
        };
        Ok(Some(cert))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DerivationScript {
    pub steps: Vec<Step>,
}

fn canonical(expr: &str, line: usize) -> Result<String> {
    parse_lattice_expr(expr)
        .map(|e| e.to_string())
        .map_err(|e| Error::Script { line, msg: format!("bad lattice `{expr}`: {e}") })
}

impl DerivationScript {
    pub fn builtin() -> Result<Self> {
        Self::parse(BUILTIN_SCRIPT)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut steps: Vec<Step> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Script { line, msg };
            let mut words = body.split_whitespace();
            if words.next() != Some("step") {
                return Err(err("expected `step`".into()));
            }
            let kind: StepKind = words.next().ok_or_else(|| err("missing step kind".into()))?.parse().map_err(err)?;
            let mut params = BTreeMap::new();
            for w in words {
                let (k, v) = w.split_once('=').ok_or_else(|| err(format!("expected key=value, got `{w}`")))?;
                if params.insert(k.to_string(), v.to_string()).is_some() {
                    return Err(err(format!("`{k}` given twice")));
                }
            }
            let lattice = params.remove("lattice").ok_or_else(|| err("missing lattice=".into()))?;
            let lattice = canonical(&lattice, line)?;
            if let Some(k) = params.keys().find(|k| !kind.keys().contains(&k.as_str())) {
                return Err(err(format!("`{k}` does not apply to {kind}")));
            }
            if let Some(k) = kind.required().iter().find(|k| !params.contains_key(**k)) {
                return Err(err(format!("{kind} needs `{k}`")));
            }
            for key in ["base", "larger", "from", "summand"] {
                if let Some(v) = params.get_mut(key) {
                    *v = canonical(v, line)?;
                }
            }
            let step = Step { line, kind, lattice, params };
            for input in step.inputs() {
                if !steps.iter().any(|s| s.kind.produces_certificate() && s.lattice == input) {
                    return Err(err(format!("{input} is not produced by an earlier step")));
                }
            }
            if kind.produces_certificate()
                && steps.iter().any(|s| s.kind.produces_certificate() && s.lattice == step.lattice)
            {
                return Err(err(format!("{} is derived twice", step.lattice)));
            }
            steps.push(step);
        }
        Ok(DerivationScript { steps })
    }

    /// Position of each step in the dependency order: 0 for steps without
    /// inputs, otherwise one more than the deepest input.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth: Vec<usize> = Vec::with_capacity(self.steps.len());
        for s in &self.steps {
            let d = s
                .inputs()
                .iter()
                .filter_map(|x| self.producer(x).map(|j| depth[j] + 1))
                .max()
                .unwrap_or(0);
            depth.push(d);
        }
        depth
    }

    fn producer(&self, lattice: &str) -> Option<usize> {
        self.steps.iter().position(|s| s.kind.produces_certificate() && s.lattice == lattice)
    }

    /// The steps needed to certify `lattice`, in script order.
    pub fn chain_for(&self, lattice: &str) -> Option<DerivationScript> {
        let target = parse_lattice_expr(lattice).ok()?.to_string();
        let mut keep = vec![false; self.steps.len()];
        let mut todo = vec![self.producer(&target)?];
        while let Some(i) = todo.pop() {
            if !keep[i] {
                keep[i] = true;
                todo.extend(self.steps[i].inputs().iter().filter_map(|x| self.producer(x)));
            }
        }
        let steps = self.steps.iter().zip(keep).filter(|(_, k)| *k).map(|(s, _)| s.clone()).collect();
        Some(DerivationScript { steps })
    }

    /// Runs all steps. Steps of equal depth run on parallel threads; the
    /// result is indexed like `steps` and does not depend on scheduling.
    pub fn execute(&self) -> Vec<StepOutcome> {
        let depths = self.depths();
        let mut outcomes: Vec<Option<StepOutcome>> = vec![None; self.steps.len()];
        let mut certs: HashMap<String, Certificate> = HashMap::new();
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
        for d in 0..=depths.iter().copied().max().unwrap_or(0) {
            let wave: Vec<usize> = (0..self.steps.len()).filter(|&i| depths[i] == d).collect();
            for chunk in wave.chunks(workers) {
                let results: Vec<(usize, StepOutcome)> = std::thread::scope(|scope| {
                    let handles: Vec<_> = chunk
                        .iter()
                        .map(|&i| {
                            let certs = &certs;
                            let step = &self.steps[i];
                            scope.spawn(move || (i, run_step(step, certs)))
                        })
                        .collect();
                    handles.into_iter().map(|h| h.join().expect("step thread panicked")).collect()
                });
                for (i, out) in results {
                    if let StepOutcome::Certified { certificate, .. } = &out {
                        certs.insert(self.steps[i].lattice.clone(), certificate.clone());
                    }
                    outcomes[i] = Some(out);
                }
            }
        }
        outcomes.into_iter().map(|o| o.expect("every step scheduled")).collect()
    }
}

impl FromStr for DerivationScript {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[derive(Clone, Debug)]
pub enum StepOutcome {
    Certified { certificate: Certificate, millis: u128 },
    Checked { millis: u128 },
    Failed { error: String, millis: u128 },
}

fn run_step(step: &Step, certs: &HashMap<String, Certificate>) -> StepOutcome {
    let start = Instant::now();
    let result = step.perform(certs);
    let millis = start.elapsed().as_millis();
    match result {
        Ok(Some(certificate)) => StepOutcome::Certified { certificate, millis },
        Ok(None) => StepOutcome::Checked { millis },
        Err(e) => StepOutcome::Failed { error: e.to_string(), millis },
    }
}

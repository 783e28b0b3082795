//! Non-rigorous equilibrium finding, parameter continuation and the
//! end-to-end certification run.
//!
//! Numerics here only produce candidates. Every claim written to a manifest
//! goes through [`crate::prover::certify`] and [`crate::index`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::forcing::{forcing_lower_bound, ForcingInput, ForcingReport};
use crate::index::{attach_index, IndexCertificate};
use crate::problem::{Problem, ProblemSpec};
use crate::prover::{certify, EquilibriumCertificate};
use crate::seqspace::{read_coeffs_1d, read_coeffs_2d};
use crate::symmetry::{apply, group, SymOp};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CERTIFICATION: i32 = 2;
pub const EXIT_INDEX: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

/// Exit code for an error escaping a run.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_) => EXIT_CONFIG,
        Error::Index(_) => EXIT_INDEX,
        _ => EXIT_CERTIFICATION,
    }
}

// ---------------------------------------------------------------------------
// Newton

pub const NEWTON_TOL: f64 = 1e-14;
pub const NEWTON_MAX_ITER: usize = 50;
/// Largest residual accepted when the iteration stagnates at roundoff.
pub const NEWTON_STAGNATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct NewtonResult {
    pub a: DVector<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn sup(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |s, x| s.max(x.abs()))
}

/// Newton's method on `F^(m)`, stopping at residual `< 1e-14` or after 50
/// iterations. A run that stalls at roundoff below `1e-10` is accepted.
pub fn newton_solve(problem: &dyn Problem, guess: &DVector<f64>, m: usize) -> Result<NewtonResult> {
    let n = problem.dim(m);
    if guess.len() != n {
        return Err(Error::Domain(format!("guess has length {}, expected {n}", guess.len())));
    }
    let mut a = guess.clone();
    let mut res = sup(&problem.residual(&a, m));
    let mut best = (a.clone(), res, 0);
    for it in 1..=NEWTON_MAX_ITER {
        if res < NEWTON_TOL {
            break;
        }
        let f = problem.residual(&a, m);
        let j = problem.jacobian(&a, m);
        let step = j
            .lu()
            .solve(&f)
            .ok_or_else(|| Error::Solve(format!("singular Jacobian at iteration {it}, residual {res:e}")))?;
        if step.iter().any(|x| !x.is_finite()) {
            return Err(Error::Solve(format!("non-finite Newton step at iteration {it}")));
        }
        a -= &step;
        res = sup(&problem.residual(&a, m));
        if !res.is_finite() {
            return Err(Error::Solve(format!("residual overflow at iteration {it}")));
        }
        if res < best.1 {
            best = (a.clone(), res, it);
        }
        if sup(&step) <= 4.0 * f64::EPSILON * sup(&a).max(1.0) {
            break;
        }
    }
    let (a, residual, iterations) = best;
    if residual < NEWTON_TOL || residual < NEWTON_STAGNATION_TOL {
        Ok(NewtonResult { a, residual, iterations })
    } else {
        Err(Error::Solve(format!("Newton did not converge: best residual {residual:e} after {NEWTON_MAX_ITER} iterations")))
    }
}

// ---------------------------------------------------------------------------
// Parameters and continuation

/// Names the parameter varied along a branch. `lambda12` moves `λ₁ = λ₂`
/// together.
pub fn with_param(spec: &ProblemSpec, name: &str, value: f64) -> Result<ProblemSpec> {
    let mut s = *spec;
    let bad = || Error::Config(format!("problem {} has no parameter `{name}`", spec.id()));
    match &mut s {
        ProblemSpec::Cr { lambda1, lambda2 } => match name {
            "lambda1" => *lambda1 = value,
            "lambda2" => *lambda2 = value,
            "lambda12" => (*lambda1, *lambda2) = (value, value),
            _ => return Err(bad()),
        },
        ProblemSpec::Tw { lambda, c } => match name {
            "lambda" => *lambda = value,
            "c" => *c = value,
            _ => return Err(bad()),
        },
        ProblemSpec::Ok { lambda1, lambda2, lambda3 } => match name {
            "lambda1" => *lambda1 = value,
            "lambda2" => *lambda2 = value,
            "lambda3" => *lambda3 = value,
            "lambda12" => (*lambda1, *lambda2) = (value, value),
            _ => return Err(bad()),
        },
    }
    Ok(s)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BranchPoint {
    pub param: f64,
    pub coeffs: Vec<f64>,
    pub residual: f64,
    /// Set when the point was certified.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    /// Positive-eigenvalue count at a certified point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive_count: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Branch {
    pub param_name: String,
    pub step: f64,
    pub points: Vec<BranchPoint>,
    /// Why the branch stopped before the end of the range.
    pub truncated: Option<String>,
}

/// Parameter values from `range.0` to `range.1` spaced by `step`.
pub fn param_grid(range: (f64, f64), step: f64) -> Result<Vec<f64>> {
    let (a, b) = range;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Config("parameter range must be finite".into()));
    }
    if a == b {
        return Ok(vec![a]);
    }
    if !(step > 0.0) {
        return Err(Error::Config(format!("step {step} must be positive")));
    }
    let n = ((b - a).abs() / step).round() as usize;
    if ((b - a).abs() - n as f64 * step).abs() > 1e-9 * step.max((b - a).abs()) {
        return Err(Error::Config(format!("step {step} does not divide the range {a}:{b}")));
    }
    let dir = (b - a).signum();
    Ok((0..=n).map(|i| if i == n { b } else { a + dir * i as f64 * step }).collect())
}

/// Naive stepping: the previous solution is the next Newton guess. When
/// `certify_at` is given each point is certified with that `ν` and its
/// positive-eigenvalue count recorded.
pub fn continue_branch(
    spec: &ProblemSpec,
    param_name: &str,
    start: &DVector<f64>,
    range: (f64, f64),
    step: f64,
    m: usize,
    certify_at: Option<f64>,
) -> Result<Branch> {
    let grid = param_grid(range, step)?;
    let mut guess = start.clone();
    let mut points = Vec::with_capacity(grid.len());
    let mut truncated = None;
    for p in grid {
        let s = with_param(spec, param_name, p)?;
        let problem = s.build()?;
        match newton_solve(problem.as_ref(), &guess, m) {
            Ok(sol) => {
                let (mut r0, mut count) = (None, None);
                if let Some(nu) = certify_at {
                    if let Ok(c) = certify(problem.as_ref(), &sol.a, nu, m) {
                        r0 = c.r0;
                        count = crate::index::count_for(&c, m).ok().filter(|e| e.conclusive).map(|e| e.positive_count);
                    }
                }
                points.push(BranchPoint { param: p, coeffs: sol.a.iter().copied().collect(), residual: sol.residual, r0, positive_count: count });
                guess = sol.a;
            }
            Err(e) => {
                truncated = Some(format!("{param_name} = {p}: {e}"));
                break;
            }
        }
    }
    Ok(Branch { param_name: param_name.to_string(), step, points, truncated })
}

impl Branch {
    pub fn to_text(&self) -> String {
        let mut s = format!("# {}  sup|a|  residual  r0  positive_count\n", self.param_name);
        for p in &self.points {
            let amax = p.coeffs.iter().fold(0.0f64, |s, x| s.max(x.abs()));
            let r0 = p.r0.map_or("-".to_string(), |r| format!("{r:e}"));
            let n = p.positive_count.map_or("-".to_string(), |n| n.to_string());
            writeln!(s, "{} {amax:e} {:e} {r0} {n}", p.param, p.residual).unwrap();
        }
        if let Some(t) = &self.truncated {
            writeln!(s, "# truncated at {t}").unwrap();
        }
        s
    }
}

// ---------------------------------------------------------------------------
// Configuration

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "lowercase", deny_unknown_fields)]
pub enum SeedSpec {
    /// Coefficient file, `k value` or `k1 k2 value`, relative to the config.
    File { name: String, path: PathBuf },
    /// Inline coefficients `[k, value]` or `[k1, k2, value]`, refined by Newton.
    Guess { name: String, coeffs: Vec<Vec<f64>> },
    /// Inline coefficients solved at `param = from`, then continued to the
    /// configured value in steps of `step`.
    Continuation { name: String, coeffs: Vec<Vec<f64>>, param: String, from: f64, step: f64 },
}

impl SeedSpec {
    pub fn name(&self) -> &str {
        match self {
            SeedSpec::File { name, .. } | SeedSpec::Guess { name, .. } | SeedSpec::Continuation { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BettiSpec {
    /// `β_k` for `k = 0, 1, …`.
    pub beta: Vec<u64>,
    #[serde(default)]
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub spec: ProblemSpec,
    pub nu: f64,
    pub m: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Base point for relative indices: its zero state is used. Defaults to
    /// a parameter set with no unstable modes (see [`default_base`]).
    #[serde(default)]
    pub base: Option<ProblemSpec>,
    pub seeds: Vec<SeedSpec>,
    #[serde(default)]
    pub betti: Option<BettiSpec>,
    /// Directory seed paths are resolved against.
    #[serde(skip)]
    pub root: PathBuf,
}

impl RunConfig {
    pub fn from_toml(text: &str, root: &Path) -> Result<Self> {
        let mut c: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.root = root.to_path_buf();
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu >= 1.0) || !self.nu.is_finite() {
            return Err(Error::Config(format!("ν = {} must be ≥ 1", self.nu)));
        }
        if self.m < 2 {
            return Err(Error::Config(format!("m = {} must be ≥ 2", self.m)));
        }
        let base = self.base_spec();
        if base.id() != self.spec.id() {
            return Err(Error::Config("base point must belong to the same problem family".into()));
        }
        self.spec.build().map_err(|e| Error::Config(e.to_string()))?;
        base.build().map_err(|e| Error::Config(e.to_string()))?;
        let mut names = std::collections::BTreeSet::new();
        for s in &self.seeds {
            if !names.insert(s.name()) {
                return Err(Error::Config(format!("duplicate seed name `{}`", s.name())));
            }
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("no seeds given".into()));
        }
        Ok(())
    }

    pub fn base_spec(&self) -> ProblemSpec {
        self.base.unwrap_or_else(|| default_base(&self.spec))
    }
}

/// Parameters whose zero state has no positive eigenvalue, so relative
/// indices against it are Morse indices.
pub fn default_base(spec: &ProblemSpec) -> ProblemSpec {
    match *spec {
        ProblemSpec::Cr { .. } => ProblemSpec::Cr { lambda1: -1.0, lambda2: 0.0 },
        ProblemSpec::Tw { c, .. } => ProblemSpec::Tw { lambda: -1.0, c },
        ProblemSpec::Ok { lambda3, .. } => ProblemSpec::Ok { lambda1: 0.0, lambda2: 0.0, lambda3 },
    }
}

/// Flat coefficient vector at truncation `m` from sparse entries
/// `[k, value]` (1D) or `[k1, k2, value]` (2D). 1D entries are the cosine
/// coefficients of the profile `u`.
pub fn coeffs_from_entries(spec: &ProblemSpec, entries: &[Vec<f64>], m: usize) -> Result<DVector<f64>> {
    let two_d = matches!(spec, ProblemSpec::Tw { .. });
    let want = if two_d { 3 } else { 2 };
    let idx = |x: f64| -> Result<usize> {
        if x >= 0.0 && x.fract() == 0.0 {
            Ok(x as usize)
        } else {
            Err(Error::Config(format!("mode index {x} is not a nonnegative integer")))
        }
    };
    let mut dense1 = vec![0.0; m];
    let mut dense2 = DVector::zeros(m * m);
    for e in entries {
        if e.len() != want {
            return Err(Error::Config(format!("coefficient entry {e:?} needs {want} fields")));
        }
        if two_d {
            let (k1, k2) = (idx(e[0])?, idx(e[1])?);
            if k1 < m && k2 < m {
                dense2[k1 * m + k2] = e[2];
            }
        } else {
            let k = idx(e[0])?;
            if k < m {
                dense1[k] = e[1];
            }
        }
    }
    Ok(match spec {
        ProblemSpec::Tw { .. } => dense2,
        _ => from_dense_1d(spec, &dense1, m)?,
    })
}

fn from_dense_1d(spec: &ProblemSpec, a: &[f64], m: usize) -> Result<DVector<f64>> {
    match spec {
        ProblemSpec::Cr { .. } => Ok(crate::problem_cr::CrProblem::from_a1(a, m)),
        ProblemSpec::Ok { .. } => {
            if a.first().is_some_and(|x| *x != 0.0) {
                return Err(Error::Config("mass-zero problem: coefficient k = 0 must vanish".into()));
            }
            Ok(DVector::from_fn(m - 1, |i, _| a.get(i + 1).copied().unwrap_or(0.0)))
        }
        ProblemSpec::Tw { .. } => Err(Error::Domain("2D problem needs 2D coefficients".into())),
    }
}

/// Reads a coefficient file into the flat layout at truncation `m`.
pub fn read_seed_file(spec: &ProblemSpec, path: &Path, m: usize) -> Result<DVector<f64>> {
    match spec {
        ProblemSpec::Tw { .. } => {
            let (grid, n) = read_coeffs_2d(path)?;
            Ok(spec.build()?.resize(&DVector::from_vec(grid), n, m))
        }
        _ => from_dense_1d(spec, &read_coeffs_1d(path)?, m),
    }
}

/// Cosine coefficients of the profile in the text-file layout.
pub fn profile_coeffs(spec: &ProblemSpec, a: &DVector<f64>, m: usize) -> Vec<f64> {
    match spec {
        ProblemSpec::Cr { .. } => a.as_slice()[..m].to_vec(),
        ProblemSpec::Ok { .. } => std::iter::once(0.0).chain(a.iter().copied()).collect(),
        ProblemSpec::Tw { .. } => a.iter().copied().collect(),
    }
}

/// Newton-refined seed at the configured parameters.
pub fn solve_seed(config: &RunConfig, seed: &SeedSpec) -> Result<NewtonResult> {
    let problem = config.spec.build()?;
    let m = config.m;
    match seed {
        SeedSpec::File { path, .. } => {
            let guess = read_seed_file(&config.spec, &config.root.join(path), m)?;
            newton_solve(problem.as_ref(), &guess, m)
        }
        SeedSpec::Guess { coeffs, .. } => {
            let guess = coeffs_from_entries(&config.spec, coeffs, m)?;
            newton_solve(problem.as_ref(), &guess, m)
        }
        SeedSpec::Continuation { coeffs, param, from, step, .. } => {
            let target = param_value(&config.spec, param)?;
            let guess = coeffs_from_entries(&config.spec, coeffs, m)?;
            let start_spec = with_param(&config.spec, param, *from)?;
            let start = newton_solve(start_spec.build()?.as_ref(), &guess, m)?;
            let branch = continue_branch(&config.spec, param, &start.a, (*from, target), *step, m, None)?;
            if let Some(t) = branch.truncated {
                return Err(Error::Solve(format!("continuation stopped at {t}")));
            }
            let last = branch.points.last().expect("nonempty grid");
            newton_solve(problem.as_ref(), &DVector::from_vec(last.coeffs.clone()), m)
        }
    }
}

fn param_value(spec: &ProblemSpec, name: &str) -> Result<f64> {
    let bad = || Error::Config(format!("problem {} has no parameter `{name}`", spec.id()));
    Ok(match (*spec, name) {
        (ProblemSpec::Cr { lambda1, .. }, "lambda1") => lambda1,
        (ProblemSpec::Cr { lambda2, .. }, "lambda2") => lambda2,
        (ProblemSpec::Cr { lambda1, lambda2 }, "lambda12") if lambda1 == lambda2 => lambda1,
        (ProblemSpec::Tw { lambda, .. }, "lambda") => lambda,
        (ProblemSpec::Tw { c, .. }, "c") => c,
        (ProblemSpec::Ok { lambda1, .. }, "lambda1") => lambda1,
        (ProblemSpec::Ok { lambda2, .. }, "lambda2") => lambda2,
        (ProblemSpec::Ok { lambda3, .. }, "lambda3") => lambda3,
        (ProblemSpec::Ok { lambda1, lambda2, .. }, "lambda12") if lambda1 == lambda2 => lambda1,
        _ => return Err(bad()),
    })
}

// ---------------------------------------------------------------------------
// Cross-certificate comparison

/// `Some(true)` if the zeros of two certificates coincide, `Some(false)` if
/// they provably differ, `None` if the balls neither separate nor nest.
pub fn compare(a: &EquilibriumCertificate, abar_a: &DVector<f64>, b: &EquilibriumCertificate, abar_b: &DVector<f64>) -> Result<Option<bool>> {
    use crate::interval::Interval;
    let (ra, rb) = (crate::prover::c0_error(a)?, crate::prover::c0_error(b)?);
    let problem = a.spec.build()?;
    let d: Vec<Interval> = abar_a.iter().zip(abar_b.iter()).map(|(x, y)| Interval::point(*x) - Interval::point(*y)).collect();
    let delta = problem.norm(&d, a.nu, a.m);
    if delta.lo() > (Interval::point(ra) + Interval::point(rb)).hi() {
        return Ok(Some(false));
    }
    let reach = (Interval::point(rb) + Interval::point(delta.hi())).hi();
    if reach <= 1.0 && crate::prover::p_upper(&a.bounds, reach) < 0.0 {
        return Ok(Some(true));
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Run

/// One equilibrium in a manifest: a certified representative (`op` is the
/// identity) or its image under a symmetry.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub representative: String,
    pub op: SymOp,
    pub r0: f64,
    pub relative_index: i64,
    pub positive_count: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepresentativeRecord {
    pub name: String,
    pub certificate: String,
    pub plot: String,
    pub newton_residual: f64,
    pub orbit_size: usize,
    pub index: IndexCertificate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeedFailure {
    pub seed: String,
    pub exit_code: i32,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(flatten)]
    pub spec: ProblemSpec,
    pub nu: f64,
    pub m: usize,
    pub base: ProblemSpec,
    pub base_positive_count: usize,
    pub representatives: Vec<RepresentativeRecord>,
    pub equilibria: Vec<ManifestEntry>,
    /// Seeds whose solution duplicated an earlier equilibrium.
    pub duplicates: Vec<(String, String)>,
    pub failures: Vec<SeedFailure>,
    pub forcing: Option<ForcingReport>,
    pub exit_code: i32,
}

impl Manifest {
    /// Index `k` ↦ number of equilibria of relative index `k`.
    pub fn zeta(&self) -> BTreeMap<i64, u64> {
        let mut z = BTreeMap::new();
        for e in &self.equilibria {
            *z.entry(e.relative_index).or_insert(0) += 1;
        }
        z
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

struct Certified {
    name: String,
    cert: EquilibriumCertificate,
    residual: f64,
    index: IndexCertificate,
}

fn certify_seed(config: &RunConfig, seed: &SeedSpec, base: &EquilibriumCertificate) -> Result<Certified> {
    let sol = solve_seed(config, seed)?;
    let problem = config.spec.build()?;
    let mut cert = certify(problem.as_ref(), &sol.a, config.nu, config.m)?;
    let index = attach_index(&mut cert, base, "base")?;
    Ok(Certified { name: seed.name().to_string(), cert, residual: sol.residual, index })
}

/// Certifies the zero state of the base parameters.
pub fn base_certificate(config: &RunConfig) -> Result<EquilibriumCertificate> {
    let spec = config.base_spec();
    let problem = spec.build()?;
    let zero = DVector::zeros(problem.dim(config.m));
    let mut c = certify(problem.as_ref(), &zero, config.nu, config.m)?;
    crate::index::homotopy_check(&mut c);
    Ok(c)
}

/// Samples `u` on a uniform grid of `[0, π]` (512 points) or `[0, π]²`
/// (128² points).
pub fn plot_table(problem: &dyn Problem, a: &DVector<f64>, m: usize) -> String {
    let pi = std::f64::consts::PI;
    let mut s = String::new();
    match problem.spec() {
        ProblemSpec::Tw { .. } => {
            let n = 128;
            for i in 0..n {
                let x = pi * i as f64 / (n - 1) as f64;
                for j in 0..n {
                    let y = pi * j as f64 / (n - 1) as f64;
                    writeln!(s, "{x:.6} {y:.6} {:.12e}", problem.eval(a, m, &[x, y])).unwrap();
                }
                s.push('\n');
            }
        }
        _ => {
            let n = 512;
            for i in 0..n {
                let x = pi * i as f64 / (n - 1) as f64;
                writeln!(s, "{x:.6} {:.12e}", problem.eval(a, m, &[x])).unwrap();
            }
        }
    }
    s
}

/// Seeds → Newton → certify → homotopy check → relative index → symmetry
/// transfer → manifest, certificates, plots and forcing report in `out`.
///
/// Exit code 0 when everything is certified, 2 on a certification failure,
/// 3 on an inconclusive index, 4 on a configuration error.
pub fn run_pipeline(config: &RunConfig, out: &Path) -> Result<Manifest> {
    config.validate()?;
    std::fs::create_dir_all(out)?;
    let base = base_certificate(config)?;
    let base_count = crate::index::count_for(&base, config.m)?;
    if !base_count.conclusive {
        return Err(Error::Index("base point enclosure straddles zero".into()));
    }

    let results: Vec<(String, Result<Certified>)> =
        config.seeds.par_iter().map(|s| (s.name().to_string(), certify_seed(config, s, &base))).collect();

    let problem = config.spec.build()?;
    let mut failures = Vec::new();
    let mut reps: Vec<RepresentativeRecord> = Vec::new();
    let mut entries: Vec<ManifestEntry> = Vec::new();
    let mut duplicates = Vec::new();
    let mut known: Vec<(EquilibriumCertificate, DVector<f64>, String)> = Vec::new();
    let mut code = EXIT_OK;

    'seeds: for (name, r) in results {
        let c = match r {
            Ok(c) => c,
            Err(e) => {
                let ec = exit_code(&e).max(EXIT_CERTIFICATION);
                code = code.max(ec);
                failures.push(SeedFailure { seed: name, exit_code: ec, reason: e.to_string() });
                continue;
            }
        };
        let abar = c.cert.abar();
        for (kc, ka, kname) in &known {
            match compare(kc, ka, &c.cert, &abar)? {
                Some(true) => {
                    duplicates.push((c.name.clone(), kname.clone()));
                    continue 'seeds;
                }
                Some(false) => {}
                None => {
                    code = code.max(EXIT_CERTIFICATION);
                    failures.push(SeedFailure {
                        seed: c.name.clone(),
                        exit_code: EXIT_CERTIFICATION,
                        reason: format!("cannot separate from `{kname}`"),
                    });
                    continue 'seeds;
                }
            }
        }
        let orbit = transfer(&c.cert)?;
        let r0 = c.cert.r0.expect("certified");
        let rec = c.cert.index.as_ref().expect("index attached");
        for (i, (op, img)) in orbit.iter().enumerate() {
            let ename = if i == 0 { c.name.clone() } else { format!("{}#{}", c.name, i) };
            entries.push(ManifestEntry {
                name: ename.clone(),
                representative: c.name.clone(),
                op: *op,
                r0,
                relative_index: rec.relative_index,
                positive_count: rec.positive_count,
            });
            known.push((c.cert.clone(), img.clone(), ename));
        }
        let cert_file = format!("{}.json", c.name);
        let plot_file = format!("{}.dat", c.name);
        std::fs::write(out.join(&cert_file), c.cert.to_json()?)?;
        std::fs::write(out.join(&plot_file), plot_table(problem.as_ref(), &abar, config.m))?;
        reps.push(RepresentativeRecord {
            name: c.name,
            certificate: cert_file,
            plot: plot_file,
            newton_residual: c.residual,
            orbit_size: orbit.len(),
            index: c.index,
        });
    }

    let mut manifest = Manifest {
        spec: config.spec,
        nu: config.nu,
        m: config.m,
        base: config.base_spec(),
        base_positive_count: base_count.positive_count,
        representatives: reps,
        equilibria: entries,
        duplicates,
        failures,
        forcing: None,
        exit_code: code,
    };
    if let Some(b) = &config.betti {
        let report = forcing_lower_bound(&forcing_input(&manifest, b));
        std::fs::write(out.join("forcing.txt"), report.to_text())?;
        manifest.forcing = Some(report);
    }
    std::fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

pub fn forcing_input(manifest: &Manifest, betti: &BettiSpec) -> ForcingInput {
    ForcingInput {
        zeta: manifest.zeta(),
        beta: betti.beta.iter().enumerate().map(|(k, b)| (k as i64, *b)).collect(),
        provenance: betti.provenance.clone(),
    }
}

/// Distinct symmetry images of a certified equilibrium, identity first.
/// Images are separated with [`crate::symmetry::relate`].
pub fn transfer(cert: &EquilibriumCertificate) -> Result<Vec<(SymOp, DVector<f64>)>> {
    let a = cert.abar();
    let mut out: Vec<(SymOp, DVector<f64>)> = Vec::new();
    for op in group(&cert.spec) {
        let g = apply(&cert.spec, op, &a, cert.m);
        let mut new = true;
        for (_, h) in &out {
            if crate::symmetry::relate(cert, &g, h)? == crate::symmetry::Relation::Same {
                new = false;
                break;
            }
        }
        if new {
            out.push((op, g));
        }
    }
    Ok(out)
}

use std::path::Path;

use khessian_core::bounds::{khessian_upper, ma_lower_floor, stirling_limit_table};
use khessian_core::gap::{cone_distance, cubic_gap_constant, DEFAULT_ROOT_TOL};
use khessian_core::radial::{
    is_k_admissible, rayleigh_quotient_with_tol, smoothed_cone, Cone, Quadratic, SmoothedCone,
};
use khessian_core::{
    solve, sweep, BoundsReport, EigenResult, Error, HessianOrder, RadialGrid, RadialProfile,
    SolverConfig,
};

use crate::output::{format_float, Cell, Table};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// A table plus, if some solve did not converge and that is fatal for the
/// command, the message to report after printing it.
pub struct Outcome {
    pub table: Table,
    pub convergence_failure: Option<String>,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self {
            table,
            convergence_failure: None,
        }
    }
}

fn order(k: u32, n: u32) -> Result<HessianOrder, CliError> {
    Ok(HessianOrder::new(k, n)?)
}

pub fn bounds(
    ks: &[u32],
    ns: &[u32],
    log_variant: bool,
    quad_tol: f64,
) -> Result<Outcome, CliError> {
    let pairs: Vec<(u32, u32)> = ns
        .iter()
        .flat_map(|&n| ks.iter().filter(move |&&k| k <= n).map(move |&k| (k, n)))
        .collect();
    if pairs.is_empty() || pairs.iter().any(|&(k, n)| k < 1 || n < 2) {
        return Err(CliError::Usage(
            "k and n ranges must give at least one pair with 1 <= k <= n and n >= 2".into(),
        ));
    }
    let mut t = Table::new(vec![
        "k",
        "n",
        "ma_lower",
        "ma_upper",
        "k_lower_simple",
        "k_lower_holder",
        "k_upper_exact",
        "k_upper",
        "bp_gamma1",
        "bp_gamma2",
    ]);
    for (k, n) in pairs {
        let b = BoundsReport::compute(order(k, n)?, quad_tol, log_variant)?;
        t.push(vec![
            k.into(),
            n.into(),
            b.ma_lower.into(),
            b.ma_upper.into(),
            b.k_lower_simple.into(),
            b.k_lower_holder.into(),
            Cell::Text(b.k_upper_exact.to_string()),
            b.k_upper.into(),
            b.bp_lower.into(),
            b.bp_upper.into(),
        ]);
    }
    Ok(Outcome::ok(t))
}

const SOLVE_COLUMNS: [&str; 8] = [
    "k",
    "n",
    "lambda",
    "lambda_pow_k",
    "iterations",
    "residual_ode",
    "residual_identity",
    "converged",
];

fn solve_row(res: &EigenResult) -> Vec<Cell> {
    vec![
        res.order.k().into(),
        res.order.n().into(),
        res.lam.into(),
        res.lam_pow_k().into(),
        res.iterations.into(),
        res.residual_ode.into(),
        res.residual_identity.into(),
        res.converged.into(),
    ]
}

pub fn solve_one(
    k: u32,
    n: u32,
    cfg: &SolverConfig,
    dump: Option<&Path>,
    allow_unconverged: bool,
) -> Result<Outcome, CliError> {
    let res = solve(order(k, n)?, cfg)?;
    if let Some(path) = dump {
        write_profile(path, &res.profile)?;
    }
    let mut t = Table::new(SOLVE_COLUMNS.to_vec());
    t.push(solve_row(&res));
    let convergence_failure = (!res.converged && !allow_unconverged).then(|| {
        format!(
            "solver did not converge for {} after {} iterations",
            res.order, res.iterations
        )
    });
    Ok(Outcome {
        table: t,
        convergence_failure,
    })
}

fn write_profile(path: &Path, p: &RadialProfile) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Validation(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["r", "u", "u_prime"]).map_err(io)?;
    for ((r, u), s) in p.radii().iter().zip(p.values()).zip(p.slopes()) {
        let f = |v: &f64| format_float(*v).unwrap_or_default();
        w.write_record([f(r), f(u), f(s)]).map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}

/// Reads `k,n` pairs (with header) from a CSV file.
pub fn read_pairs(path: &Path) -> Result<Vec<(u32, u32)>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let field = |i: usize| -> Result<u32, CliError> {
            rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| {
                CliError::Validation(format!(
                    "{}: record {} needs integer columns k,n",
                    path.display(),
                    line + 1
                ))
            })
        };
        pairs.push((field(0)?, field(1)?));
    }
    Ok(pairs)
}

pub fn sweep_pairs(
    pairs: &[(u32, u32)],
    cfg: &SolverConfig,
    strict: bool,
) -> Result<Outcome, CliError> {
    let orders = pairs
        .iter()
        .map(|&(k, n)| order(k, n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut columns = SOLVE_COLUMNS.to_vec();
    columns.push("sandwich_ok");
    let mut t = Table::new(columns);
    let mut unconverged = Vec::new();
    for res in sweep(&orders, cfg) {
        let res = res?;
        let bounds = BoundsReport::compute(res.order, cfg.quad_tol, false)?;
        let mut row = solve_row(&res);
        row.push((res.converged && bounds.contains(res.lam, 1e-6)).into());
        t.push(row);
        if !res.converged {
            unconverged.push(res.order.to_string());
        }
    }
    let convergence_failure = (strict && !unconverged.is_empty())
        .then(|| format!("not converged: {}", unconverged.join(", ")));
    Ok(Outcome {
        table: t,
        convergence_failure,
    })
}

pub fn gap(ns: &[u32], cfg: &SolverConfig, strict: bool) -> Result<Outcome, CliError> {
    let orders = ns
        .iter()
        .map(|&n| HessianOrder::monge_ampere(n))
        .collect::<Result<Vec<_>, _>>()?;
    let alpha0 = cubic_gap_constant(DEFAULT_ROOT_TOL);
    let mut t = Table::new(vec![
        "n",
        "distance",
        "attained_radius",
        "alpha0",
        "converged",
    ]);
    let mut unconverged = Vec::new();
    for res in sweep(&orders, cfg) {
        let res = res?;
        let n = res.order.n();
        match cone_distance(&res) {
            Ok(rec) => t.push(vec![
                n.into(),
                rec.distance.into(),
                rec.attained_radius.into(),
                alpha0.into(),
                true.into(),
            ]),
            Err(Error::NotConverged { .. }) => {
                unconverged.push(n.to_string());
                t.push(vec![
                    n.into(),
                    Cell::Missing,
                    Cell::Missing,
                    alpha0.into(),
                    false.into(),
                ]);
            }
            Err(e) => return Err(e.into()),
        }
    }
    let convergence_failure = (strict && !unconverged.is_empty())
        .then(|| format!("not converged for n = {}", unconverged.join(", ")));
    Ok(Outcome {
        table: t,
        convergence_failure,
    })
}

pub enum ProfileSpec {
    Cone,
    SmoothedCone(f64),
    Quadratic,
    File(String),
}

impl ProfileSpec {
    /// `cone`, `cone(ε)`, `quadratic` or `file:<path>`; `epsilon > 0`
    /// smooths a plain `cone`.
    pub fn parse(spec: &str, epsilon: Option<f64>) -> Result<Self, CliError> {
        let spec = spec.trim();
        let parsed = if spec == "cone" {
            ProfileSpec::Cone
        } else if spec == "quadratic" {
            ProfileSpec::Quadratic
        } else if let Some(path) = spec.strip_prefix("file:") {
            ProfileSpec::File(path.to_string())
        } else if let Some(inner) = spec.strip_prefix("cone(").and_then(|s| s.strip_suffix(')')) {
            let eps: f64 = inner
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad smoothing parameter in '{spec}'")))?;
            ProfileSpec::SmoothedCone(eps)
        } else {
            return Err(CliError::Usage(format!(
                "unknown profile '{spec}' (expected cone, cone(eps), quadratic or file:<path>)"
            )));
        };
        match (parsed, epsilon) {
            (ProfileSpec::Cone, Some(e)) if e != 0.0 => Ok(ProfileSpec::SmoothedCone(e)),
            (ProfileSpec::Cone, _) => Ok(ProfileSpec::Cone),
            (p, None) => Ok(p),
            (ProfileSpec::SmoothedCone(a), Some(b)) if a == b => Ok(ProfileSpec::SmoothedCone(a)),
            _ => Err(CliError::Usage(
                "--epsilon only applies to the cone profile".into(),
            )),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ProfileSpec::Cone => "cone".into(),
            ProfileSpec::SmoothedCone(e) => format!("cone({e:e})"),
            ProfileSpec::Quadratic => "quadratic".into(),
            ProfileSpec::File(p) => format!("file:{p}"),
        }
    }
}

/// Reads `r,u[,u_prime]` with a header; slopes are differenced if absent.
pub fn read_profile(path: &Path) -> Result<RadialProfile, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let (mut r, mut u, mut du) = (Vec::new(), Vec::new(), Vec::new());
    let mut width = None;
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let bad = || {
            CliError::Validation(format!(
                "{}: record {} must hold 2 or 3 numeric columns r,u[,u_prime]",
                path.display(),
                line + 1
            ))
        };
        if !(2..=3).contains(&rec.len()) || *width.get_or_insert(rec.len()) != rec.len() {
            return Err(bad());
        }
        let nums = rec
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        r.push(nums[0]);
        u.push(nums[1]);
        if let Some(&s) = nums.get(2) {
            du.push(s);
        }
    }
    let grid = RadialGrid::from_nodes(r)?;
    let p = if width == Some(3) {
        RadialProfile::new(grid, u, du)?
    } else {
        RadialProfile::from_values(grid, u)?
    };
    Ok(p)
}

pub fn rayleigh(
    spec: &ProfileSpec,
    k: u32,
    n: u32,
    grid_size: usize,
    quad_tol: f64,
) -> Result<Outcome, CliError> {
    let ord = order(k, n)?;
    let grid = || RadialGrid::uniform(grid_size);
    let (quotient, sampled) = match spec {
        ProfileSpec::Cone => (
            rayleigh_quotient_with_tol(&Cone, ord, quad_tol)?,
            RadialProfile::cone(grid()?),
        ),
        ProfileSpec::SmoothedCone(eps) => (
            rayleigh_quotient_with_tol(&SmoothedCone::new(*eps)?, ord, quad_tol)?,
            smoothed_cone(*eps, grid()?)?,
        ),
        ProfileSpec::Quadratic => (
            rayleigh_quotient_with_tol(&Quadratic, ord, quad_tol)?,
            RadialProfile::quadratic(grid()?),
        ),
        ProfileSpec::File(path) => {
            let p = read_profile(Path::new(path))?;
            (rayleigh_quotient_with_tol(&p, ord, quad_tol)?, p)
        }
    };
    let mut t = Table::new(vec![
        "k",
        "n",
        "profile",
        "quotient",
        "quotient_root",
        "admissible",
    ]);
    t.push(vec![
        k.into(),
        n.into(),
        Cell::Text(spec.label()),
        quotient.into(),
        quotient.powf(1.0 / k as f64).into(),
        is_k_admissible(&sampled, ord).into(),
    ]);
    Ok(Outcome::ok(t))
}

const EXACT_LIMIT_MAX_N: u32 = 170;

pub fn limits(n_max: u32) -> Result<Outcome, CliError> {
    if n_max < 2 {
        return Err(CliError::Validation(format!(
            "--n-max must be >= 2, got {n_max}"
        )));
    }
    let orders = (2..=n_max)
        .map(HessianOrder::monge_ampere)
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(vec!["n", "lower_floor", "upper_root", "gap"]);
    for (row, ord) in stirling_limit_table(&orders).into_iter().zip(&orders) {
        let floor = ma_lower_floor(row.n);
        // exact rational path while the factorials stay small; log-Gamma beyond
        let upper = if row.n <= EXACT_LIMIT_MAX_N {
            khessian_upper(*ord).root
        } else {
            row.upper_root
        };
        t.push(vec![
            row.n.into(),
            floor.into(),
            upper.into(),
            (upper - floor).into(),
        ]);
    }
    Ok(Outcome::ok(t))
}

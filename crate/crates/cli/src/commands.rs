use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use tropreg::applications::{
    frob_residual_sq, loglik, network_reduce, parse_edge_list, poly_fit, shortest_paths,
    simulate_orbit, sysid_fit, SysIdConfig, TimeSeries,
};
use tropreg::factorization::{
    alternating_factorize, symmetric_factorize, AlternatingConfig, SymmetricConfig,
};
use tropreg::oracles::{
    binary_descent, grid_oracle, pattern_census, setcover_reduction, SetCoverInstance,
};
use tropreg::pattern::{compute_pattern_tol, equivalence_classes, is_feasible};
use tropreg::regression::{
    brute_force_exact, irsls, multistart_newton, solve_inf, steepest_descent, IrslsConfig, Norm,
};
use tropreg::textio::{
    parse_csv, parse_matrix, parse_table, parse_token, parse_vector, write_matrix, write_rows,
};
use tropreg::{
    NewtonConfig, RegressionProblem, Semiring, SteepestLimits, TropError, TropicalMatrix,
};

use crate::report::{document, matrix, num, vector};
use crate::{Cli, Command, Method, NormArg, SolverArgs, VerifyCommand};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_matrix(path: &Path, semiring: Semiring) -> Result<TropicalMatrix> {
    parse_matrix(&read(path)?, semiring).with_context(|| format!("in {}", path.display()))
}

fn read_vector(path: &Path) -> Result<Vec<f64>> {
    parse_vector(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn rectangular(rows: Vec<Vec<f64>>, path: &Path) -> Result<Vec<Vec<f64>>> {
    if let Some(i) = rows.iter().position(|r| r.len() != rows[0].len()) {
        return Err(TropError::Parse(format!(
            "{}: data row {} has {} fields, expected {}",
            path.display(),
            i + 1,
            rows[i].len(),
            rows[0].len()
        ))
        .into());
    }
    Ok(rows)
}

fn read_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let rows = parse_csv(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    rectangular(rows, path)
}

fn read_table(path: &Path) -> Result<Vec<Vec<f64>>> {
    let rows = parse_table(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    rectangular(rows, path)
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    Ok(text
        .split(',')
        .map(|t| parse_token(t.trim()))
        .collect::<tropreg::Result<_>>()?)
}

fn newton_config(s: &SolverArgs, seed: u64) -> NewtonConfig {
    NewtonConfig {
        mu: s.mu,
        polish_mu: (s.polish_mu > 0.0).then_some(s.polish_mu),
        stall: s.stall,
        max_iter: s.max_iter,
        starts: s.starts,
        seed,
        record_trace: false,
    }
}

fn solver_json(s: &SolverArgs) -> Value {
    json!({
        "starts": s.starts,
        "mu": num(s.mu),
        "polish_mu": num(s.polish_mu),
        "stall": s.stall,
        "max_iter": s.max_iter,
    })
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct Report {
    command: &'static str,
    config: Value,
    result: Value,
}

pub fn run(cli: &Cli) -> Result<()> {
    let start = Instant::now();
    let report = match &cli.command {
        Command::Regress {
            matrix: m,
            target,
            norm,
            method,
            lambda,
            x0,
            cap,
            solver,
        } => regress(
            cli,
            m,
            target,
            *norm,
            *method,
            *lambda,
            x0.as_deref(),
            *cap,
            solver,
        )?,
        Command::Sysid {
            series,
            lambda,
            sigma,
            solver,
        } => sysid(cli, series, *lambda, *sigma, solver)?,
        Command::Residual {
            matrix: m,
            series,
            sigma,
        } => residual_cmd(m, series, *sigma)?,
        Command::Factorize {
            matrix: m,
            rank,
            symmetric,
            zero_diag,
            restarts,
            max_sweeps,
            solver,
        } => factorize(
            cli,
            m,
            *rank,
            *symmetric,
            *zero_diag,
            *restarts,
            *max_sweeps,
            solver,
        )?,
        Command::Netreduce {
            edges,
            rank,
            restarts,
            features,
        } => netreduce(cli, edges, *rank, *restarts, features.as_deref())?,
        Command::Polyfit {
            points,
            targets,
            slopes,
            solver,
        } => polyfit(cli, points, targets, slopes, solver)?,
        Command::Simulate {
            matrix: m,
            x0,
            steps,
            sigma,
        } => return simulate(cli, m, x0.as_deref(), *steps, *sigma),
        Command::Paths { edges } => return paths(cli, edges),
        Command::Verify { check } => verify(check)?,
    };
    let timing = (!cli.no_timing).then(|| start.elapsed().as_secs_f64() * 1e3);
    emit(
        cli,
        &document(report.command, report.config, report.result, timing),
    )
}

#[allow(clippy::too_many_arguments)]
fn regress(
    cli: &Cli,
    m: &Path,
    target: &Path,
    norm: NormArg,
    method: Method,
    lambda: f64,
    x0: Option<&str>,
    cap: usize,
    solver: &SolverArgs,
) -> Result<Report> {
    let a = read_matrix(m, Semiring::MaxPlus)?;
    let y = read_vector(target)?;
    let problem = RegressionProblem::new(a, y)?;
    let cfg = newton_config(solver, cli.seed);
    if lambda != 0.0 && (norm != NormArg::Two || method != Method::Newton) {
        bail!("--lambda requires --norm two --method newton");
    }
    let sol = match (norm, method) {
        (NormArg::Inf, _) => solve_inf(&problem)?,
        (NormArg::Two, Method::Exact) => brute_force_exact(&problem, cap)?,
        (NormArg::Two, Method::Steepest) => {
            let start = match x0 {
                Some(t) => parse_list(t)?,
                None => {
                    let s = solve_inf(&problem)?.x;
                    s.iter()
                        .map(|v| if v.is_finite() { *v } else { 0.0 })
                        .collect()
                }
            };
            steepest_descent(&problem, &start, &SteepestLimits::default())?
        }
        (NormArg::Two, Method::Newton) => {
            let fit = multistart_newton(&problem, &cfg)?;
            if lambda > 0.0 {
                let rcfg = IrslsConfig {
                    newton: cfg.clone(),
                    ..IrslsConfig::default()
                };
                irsls(problem.a(), problem.y(), lambda, &fit.x, &rcfg)?
            } else {
                fit
            }
        }
    };
    let norm_name = match norm {
        NormArg::Inf => Norm::Inf,
        NormArg::Two => Norm::Two,
    };
    let mut result = json!({
        "x": vector(&sol.x),
        "residual": num(sol.residual),
        "status": sol.status.to_string(),
        "iterations": sol.iterations,
        "seed": cli.seed,
    });
    if let Some(p) = sol.penalized_objective {
        result["penalized_objective"] = num(p);
    }
    let mut config = solver_json(solver);
    config["norm"] = json!(norm_name.to_string());
    config["method"] = json!(format!("{method:?}").to_lowercase());
    config["lambda"] = num(lambda);
    config["seed"] = json!(cli.seed);
    Ok(Report {
        command: "regress",
        config,
        result,
    })
}

fn read_series(path: &Path) -> Result<TimeSeries> {
    Ok(TimeSeries::new(read_csv(path)?)?)
}

fn evidence_json(s: &[Vec<usize>]) -> Value {
    json!(s)
}

fn sysid(
    cli: &Cli,
    series: &Path,
    lambda: f64,
    sigma: Option<f64>,
    solver: &SolverArgs,
) -> Result<Report> {
    let x = read_series(series)?;
    let newton = newton_config(solver, cli.seed);
    let cfg = SysIdConfig {
        irsls: IrslsConfig {
            newton: newton.clone(),
            ..IrslsConfig::default()
        },
        newton,
        sigma,
    };
    let r = sysid_fit(&x, lambda, &cfg)?;
    let mut config = solver_json(solver);
    config["lambda"] = num(lambda);
    config["sigma"] = sigma.map_or(Value::Null, num);
    config["seed"] = json!(cli.seed);
    Ok(Report {
        command: "sysid",
        config,
        result: json!({
            "A_hat": matrix(&r.a_hat),
            "frob_residual_sq": num(r.frob_residual_sq),
            "row_residual_sq": vector(&r.row_residual_sq),
            "evidence": evidence_json(&r.evidence),
            "loglik": r.loglik.map_or(Value::Null, num),
            "steps": x.steps(),
        }),
    })
}

fn residual_cmd(m: &Path, series: &Path, sigma: Option<f64>) -> Result<Report> {
    let a = read_matrix(m, Semiring::MaxPlus)?;
    let x = read_series(series)?;
    let r = frob_residual_sq(&a, &x)?;
    let ll = sigma.map(|s| loglik(&a, &x, s)).transpose()?;
    Ok(Report {
        command: "residual",
        config: json!({ "sigma": sigma.map_or(Value::Null, num) }),
        result: json!({
            "frob_residual_sq": num(r),
            "loglik": ll.map_or(Value::Null, num),
            "steps": x.steps(),
        }),
    })
}

#[allow(clippy::too_many_arguments)]
fn factorize(
    cli: &Cli,
    m: &Path,
    rank: usize,
    symmetric: bool,
    zero_diag: bool,
    restarts: usize,
    max_sweeps: Option<usize>,
    solver: &SolverArgs,
) -> Result<Report> {
    let c = read_matrix(m, Semiring::MinPlus)?;
    if zero_diag && !symmetric {
        bail!("--zero-diag requires --symmetric");
    }
    let r = if symmetric {
        let mut cfg = SymmetricConfig {
            restarts,
            seed: cli.seed,
            ..SymmetricConfig::default()
        };
        if let Some(s) = max_sweeps {
            cfg.max_iter = s;
        }
        symmetric_factorize(&c, rank, !zero_diag, &cfg)?
    } else {
        let mut inner = newton_config(solver, cli.seed);
        if solver.starts == 10 {
            inner.starts = AlternatingConfig::default().newton.starts;
        }
        let mut cfg = AlternatingConfig {
            newton: inner,
            restarts,
            seed: cli.seed,
            ..AlternatingConfig::default()
        };
        if let Some(s) = max_sweeps {
            cfg.max_sweeps = s;
        }
        alternating_factorize(&c, rank, &cfg)?
    };
    Ok(Report {
        command: "factorize",
        config: json!({
            "rank": rank,
            "symmetric": symmetric,
            "zero_diag": zero_diag,
            "restarts": restarts,
            "max_sweeps": max_sweeps,
            "seed": cli.seed,
        }),
        result: json!({
            "a": matrix(&r.a),
            "b": r.b.as_ref().map_or(Value::Null, matrix),
            "residual_sq": num(r.residual_sq),
            "sweeps": r.sweeps,
            "normalized": r.normalized,
        }),
    })
}

fn default_features_path(edges: &Path) -> PathBuf {
    let stem = edges
        .file_stem()
        .map_or("graph".into(), |s| s.to_string_lossy().into_owned());
    edges.with_file_name(format!("{stem}_features.csv"))
}

fn netreduce(
    cli: &Cli,
    edges: &Path,
    rank: usize,
    restarts: usize,
    features: Option<&Path>,
) -> Result<Report> {
    let (list, n) =
        parse_edge_list(&read(edges)?).with_context(|| format!("in {}", edges.display()))?;
    let dist = shortest_paths(&list, n)?;
    let cfg = SymmetricConfig {
        restarts,
        seed: cli.seed,
        ..SymmetricConfig::default()
    };
    let r = network_reduce(&dist, rank, &cfg)?;
    let out = features.map_or_else(|| default_features_path(edges), Path::to_path_buf);
    let mut csv = format!(
        "# vertex,{},label\n",
        (0..rank)
            .map(|k| format!("a{k}"))
            .collect::<Vec<_>>()
            .join(",")
    );
    for (i, label) in r.labels.iter().enumerate() {
        let mut row = vec![i as f64];
        row.extend_from_slice(r.factorization.a.row(i));
        row.push(*label as f64);
        csv.push_str(&write_rows(&[row], ","));
    }
    fs::write(&out, csv).with_context(|| format!("cannot write {}", out.display()))?;
    Ok(Report {
        command: "netreduce",
        config: json!({ "rank": rank, "restarts": restarts, "seed": cli.seed }),
        result: json!({
            "vertices": n,
            "edges": list.len(),
            "a": matrix(&r.factorization.a),
            "labels": r.labels,
            "residual_sq": num(r.factorization.residual_sq),
            "sweeps": r.factorization.sweeps,
            "features": out.display().to_string(),
        }),
    })
}

fn polyfit(
    cli: &Cli,
    points: &Path,
    targets: &Path,
    slopes: &Path,
    solver: &SolverArgs,
) -> Result<Report> {
    let pts = read_csv(points)?;
    let y = read_vector(targets)?;
    let s = read_table(slopes)?;
    let (spec, sol) = poly_fit(&pts, &y, &s, &newton_config(solver, cli.seed))?;
    let mut config = solver_json(solver);
    config["seed"] = json!(cli.seed);
    Ok(Report {
        command: "polyfit",
        config,
        result: json!({
            "coeffs": vector(&spec.coeffs),
            "slopes": spec.slopes.iter().map(|r| vector(r)).collect::<Vec<_>>(),
            "residual": num(sol.residual),
            "status": sol.status.to_string(),
            "iterations": sol.iterations,
        }),
    })
}

fn simulate(cli: &Cli, m: &Path, x0: Option<&str>, steps: usize, sigma: f64) -> Result<()> {
    let a = read_matrix(m, Semiring::MaxPlus)?;
    let start = match x0 {
        Some(t) => parse_list(t)?,
        None => vec![0.0; a.rows()],
    };
    let orbit = simulate_orbit(&a, &start, steps, sigma, cli.seed)?;
    emit(cli, &write_rows(orbit.states(), ","))
}

fn paths(cli: &Cli, edges: &Path) -> Result<()> {
    let (list, n) =
        parse_edge_list(&read(edges)?).with_context(|| format!("in {}", edges.display()))?;
    emit(cli, &write_matrix(&shortest_paths(&list, n)?))
}

fn parse_family(text: &str) -> Result<Vec<Vec<usize>>> {
    text.split(';')
        .map(|set| {
            set.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| TropError::Parse(format!("bad set element {t:?}")).into())
                })
                .collect()
        })
        .collect()
}

fn verify(check: &VerifyCommand) -> Result<Report> {
    match check {
        VerifyCommand::Grid {
            matrix: m,
            target,
            lo,
            hi,
            step,
            norm,
        } => {
            let a = read_matrix(m, Semiring::MaxPlus)?;
            let problem = RegressionProblem::new(a, read_vector(target)?)?;
            let norm = match norm {
                NormArg::Inf => Norm::Inf,
                NormArg::Two => Norm::Two,
            };
            let bounds = vec![(*lo, *hi); problem.d()];
            let (x, r) = grid_oracle(&problem, &bounds, *step, norm)?;
            Ok(Report {
                command: "verify-grid",
                config: json!({ "lo": num(*lo), "hi": num(*hi), "step": num(*step), "norm": norm.to_string() }),
                result: json!({ "x": vector(&x), "residual": num(r) }),
            })
        }
        VerifyCommand::Census { matrix: m, cap } => {
            let a = read_matrix(m, Semiring::MaxPlus)?;
            let c = pattern_census(&a, *cap)?;
            let by_k: Vec<Value> = (1..=c.n.min(c.d))
                .map(|k| {
                    json!({
                        "classes": k,
                        "count": c.counts.get(&k).copied().unwrap_or(0),
                        "bound": c.bound(k).to_string(),
                    })
                })
                .collect();
            Ok(Report {
                command: "verify-census",
                config: json!({ "cap": cap }),
                result: json!({ "total": c.total, "by_classes": by_k }),
            })
        }
        VerifyCommand::Pattern {
            matrix: m,
            x,
            tie_tol,
        } => {
            let a = read_matrix(m, Semiring::MaxPlus)?;
            let x = parse_list(x)?;
            let p = compute_pattern_tol(&a, &x, *tie_tol)?;
            let classes = equivalence_classes(&p);
            Ok(Report {
                command: "verify-pattern",
                config: json!({ "x": vector(&x), "tie_tol": num(*tie_tol) }),
                result: json!({
                    "pattern": p.sets(),
                    "feasible": is_feasible(&a, &p)?,
                    "classes": classes.count(),
                    "row_class": classes.row_class(),
                }),
            })
        }
        VerifyCommand::Setcover { family, k, n } => {
            let fam = parse_family(family)?;
            let n = n.unwrap_or_else(|| fam.iter().flatten().copied().max().unwrap_or(0));
            let inst = SetCoverInstance::new(n, fam, *k)?;
            let (a, y) = setcover_reduction(&inst)?;
            let z = binary_descent(&a, &y)?;
            let cover = inst.min_cover_size();
            Ok(Report {
                command: "verify-setcover",
                config: json!({ "n": n, "m": inst.m(), "k": k }),
                result: json!({
                    "rows": a.rows(),
                    "descent": z.is_some(),
                    "direction": z.as_deref().map_or(Value::Null, vector),
                    "min_cover_size": cover,
                    "has_cover": cover <= *k,
                    "agree": z.is_some() == (cover <= *k),
                }),
            })
        }
    }
}

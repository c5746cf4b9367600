use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use conelab::cross_sections::{circle_spectrum, load_spectrum, SphereBase};
use conelab::experiments::{
    run_experiment, EpsilonGrid, ExperimentKind, ExperimentReport, RuleOutcome, Spacing,
    SweepConfig, Tolerances,
};
use conelab::revolution::{solve_mode, ProfileFunction};
use conelab::spectral::{
    alpha_exponent, ball_energy, is_sharp, mean_ball_energy, ConeSpec, HarmonicExpansion,
};
use conelab::CrossSectionF64;
use serde::Serialize;

use crate::args::{BaseArgs, Command, Overrides};
use crate::output::{csv_bytes, json_bytes, sha256_hex, Invalid, Manifest, Staged};

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Alpha { n, lambda } => {
            println!("{:?}", alpha_exponent(n, lambda)?);
            Ok(())
        }
        Command::Spectrum { base, count } => spectrum(&base, count),
        Command::Energy {
            base,
            index,
            mode,
            coefficient,
            radii,
        } => energy(&base, index, mode, coefficient, &radii),
        Command::Decay {
            beta,
            mode,
            levels,
            r_max,
            eps,
            eps_stop,
            eps_count,
            sharp_only,
            out,
        } => {
            let epsilons = match (eps, eps_stop) {
                (None, None) => None,
                (None, Some(_)) => return Err(Invalid::new("--eps-stop", "requires --eps").into()),
                (Some(start), stop) => Some(EpsilonGrid {
                    start,
                    stop: stop.unwrap_or(start),
                    count: eps_count.unwrap_or(if stop.is_some() { 5 } else { 1 }),
                    spacing: Spacing::Geometric,
                }),
            };
            let cfg = SweepConfig {
                levels,
                sharp_only: sharp_only.then_some(true),
                epsilons,
                r_max,
                ..base_config(ExperimentKind::Decay, beta, mode)
            };
            run_config("decay", cfg, None, &out.out)
        }
        Command::Iterate {
            beta,
            mode,
            p,
            forcing,
            e0,
            r0,
            threshold,
            kmax,
            out,
        } => {
            let cfg = SweepConfig {
                p: Some(p),
                forcing,
                e0,
                r_max: r0,
                threshold,
                kmax,
                ..base_config(ExperimentKind::Iterate, beta, mode)
            };
            run_config("iterate", cfg, None, &out.out)
        }
        Command::SolveMode {
            beta,
            eps,
            k,
            r_max,
            tol,
            out,
        } => solve(beta, eps, k, r_max, tol, &out.out),
        Command::Sweep {
            config,
            manifest,
            jobs,
            overrides,
            out,
        } => {
            let cfg = match (config, manifest) {
                (Some(path), _) => {
                    let text = read_input("--config", &path)?;
                    config_with_overrides(&text, &overrides)?
                }
                (None, Some(path)) => {
                    let text = read_input("--manifest", &path)?;
                    config_from_manifest(&text, &overrides)?
                }
                (None, None) => {
                    return Err(
                        Invalid::new("--config", "a config or a manifest is required").into(),
                    )
                }
            };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Invalid::new("--jobs", e.to_string()))?;
            run_config("sweep", cfg, Some(&pool), &out.out)
        }
    }
}

fn base_config(experiment: ExperimentKind, beta: f64, k: u32) -> SweepConfig {
    SweepConfig {
        experiment,
        beta,
        epsilons: None,
        k,
        gamma: None,
        p: None,
        r_max: 1.0,
        tolerances: Tolerances::default(),
        holder_depth: None,
        levels: None,
        sharp_only: None,
        forcing: None,
        e0: None,
        kmax: None,
        threshold: None,
    }
}

fn read_input(param: &str, path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Invalid::new(param, format!("cannot read {}: {e}", path.display())).into())
}

/// Parses a config document and replaces keys given on the command line.
pub fn config_with_overrides(text: &str, overrides: &Overrides) -> Result<SweepConfig> {
    let mut value: serde_json::Value = match serde_json::from_str(text) {
        Ok(v) => v,
        // let the core parser name the offending key
        Err(_) => return Ok(SweepConfig::from_json(text)?),
    };
    if let Some(obj) = value.as_object_mut() {
        let mut set = |key: &str, v: Option<serde_json::Value>| {
            if let Some(v) = v {
                obj.insert(key.to_string(), v);
            }
        };
        set("beta", overrides.beta.map(Into::into));
        set("k", overrides.k.map(Into::into));
        set("gamma", overrides.gamma.map(Into::into));
        set("p", overrides.p.map(Into::into));
        set("r_max", overrides.r_max.map(Into::into));
        set("holder_depth", overrides.holder_depth.map(Into::into));
        if overrides.ode_tol.is_some() || overrides.quadrature_tol.is_some() {
            let tol = obj
                .entry("tolerances")
                .or_insert_with(|| serde_json::json!({}));
            if let Some(t) = tol.as_object_mut() {
                if let Some(v) = overrides.ode_tol {
                    t.insert("ode".into(), v.into());
                }
                if let Some(v) = overrides.quadrature_tol {
                    t.insert("quadrature".into(), v.into());
                }
            }
        }
    }
    Ok(SweepConfig::from_json(&value.to_string())?)
}

fn config_from_manifest(text: &str, overrides: &Overrides) -> Result<SweepConfig> {
    let manifest: Manifest = serde_json::from_str(text)
        .map_err(|e| Invalid::new("--manifest", format!("not a run manifest: {e}")))?;
    if manifest.command == "solve-mode" {
        return Err(Invalid::new(
            "--manifest",
            "solve-mode manifests cannot be re-run as an experiment",
        )
        .into());
    }
    let recorded = SweepConfig::from_json(&manifest.config.to_string())?;
    let hash = sha256_hex(recorded.to_json().as_bytes());
    if hash != manifest.config_sha256 {
        return Err(Invalid::new(
            "config_sha256",
            format!(
                "manifest records {} but its config hashes to {hash}",
                manifest.config_sha256
            ),
        )
        .into());
    }
    config_with_overrides(&manifest.config.to_string(), overrides)
}

fn run_config(
    command: &str,
    cfg: SweepConfig,
    pool: Option<&rayon::ThreadPool>,
    out: &Path,
) -> Result<()> {
    cfg.validate()?;
    let started = Instant::now();
    let report = match pool {
        Some(pool) => pool.install(|| run_experiment(&cfg))?,
        None => run_experiment(&cfg)?,
    };
    let name = cfg.experiment.name();
    let mut staged = Staged::default();
    let mut rules: Vec<RuleOutcome> = Vec::new();
    match &report {
        ExperimentReport::Sweep(r) => {
            staged.add(format!("{name}.csv"), csv_bytes(&r.rows)?);
            staged.add(format!("{name}.json"), json_bytes(r));
            rules.extend(r.rules.iter().cloned());
        }
        ExperimentReport::Decay(rs) => {
            staged.add(
                format!("{name}.csv"),
                csv_bytes(rs.iter().flat_map(|r| &r.rows))?,
            );
            staged.add(format!("{name}.json"), json_bytes(rs));
            rules.extend(rs.iter().flat_map(|r| r.rules.iter().cloned()));
        }
        ExperimentReport::Iterate(r) => {
            staged.add(format!("{name}.csv"), csv_bytes(&r.rows)?);
            staged.add(format!("{name}.json"), json_bytes(r));
            let detail = match r.first_below {
                Some(k) => format!(
                    "below {:e} after {k} steps, predicted {}",
                    r.threshold, r.predicted_steps
                ),
                None => format!(
                    "never below {:e} within {} steps",
                    r.threshold,
                    r.rows.len() - 1
                ),
            };
            rules.push(RuleOutcome {
                rule: "reaches-threshold".into(),
                passed: r.passed,
                detail,
            });
        }
    }
    let config_json = cfg.to_json();
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config: serde_json::from_str(&config_json).expect("config round-trips"),
        config_sha256: sha256_hex(config_json.as_bytes()),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        outputs: staged.names(),
    };
    let written = staged.commit(out, &manifest)?;
    for rule in &rules {
        println!(
            "{} {}: {}",
            if rule.passed { "PASS" } else { "FAIL" },
            rule.rule,
            rule.detail
        );
    }
    println!(
        "{name}: {} ({} files in {})",
        if report.passed() { "passed" } else { "failed" },
        written.len(),
        out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct SampleRow {
    r: f64,
    h: f64,
    dh: f64,
    d2h: f64,
    residual: f64,
}

fn solve(beta: f64, eps: Option<f64>, k: u32, r_max: f64, tol: f64, out: &Path) -> Result<()> {
    let profile = match eps {
        Some(e) => ProfileFunction::smoothed(beta, e, r_max)?,
        None => ProfileFunction::exact_cone(beta, r_max)?,
    };
    let started = Instant::now();
    let sol = solve_mode(&profile, k, tol)?;
    let rows = sol.samples().into_iter().map(|s| SampleRow {
        r: s.r,
        h: s.h,
        dh: s.dh,
        d2h: s.d2h,
        residual: s.residual,
    });
    let mut staged = Staged::default();
    staged.add("mode.csv", csv_bytes(rows)?);
    let config =
        serde_json::json!({ "beta": beta, "eps": eps, "k": k, "r_max": r_max, "tol": tol });
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "solve-mode".into(),
        config_sha256: sha256_hex(config.to_string().as_bytes()),
        config,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        outputs: staged.names(),
    };
    staged.commit(out, &manifest)?;
    println!(
        "k = {k}: {} nodes, max residual {:e}, tip exponent {}",
        sol.grid().len(),
        sol.max_residual(),
        sol.series().exponent()
    );
    Ok(())
}

fn cross_section(base: &BaseArgs, count: usize) -> Result<CrossSectionF64> {
    let chosen = [
        base.beta.is_some(),
        base.sphere.is_some(),
        base.spectrum.is_some(),
    ];
    if chosen.iter().filter(|&&c| c).count() != 1 {
        return Err(Invalid::new(
            "--beta/--sphere/--spectrum",
            "choose exactly one cross-section",
        )
        .into());
    }
    if let Some(beta) = base.beta {
        return Ok(circle_spectrum(beta, count)?);
    }
    if let Some(m) = base.sphere {
        return Ok(SphereBase::new(m)?.spectrum(count)?);
    }
    let path = base.spectrum.as_ref().expect("one base chosen");
    let text = read_input("--spectrum", path)?;
    load_spectrum(&text).with_context(|| format!("loading {}", path.display()))
}

fn cone(base: &BaseArgs, cs: CrossSectionF64) -> Result<ConeSpec<f64>> {
    let n = base.n.unwrap_or(cs.base_dimension() + 1.0);
    Ok(ConeSpec::new(n, cs)?)
}

#[derive(Serialize)]
struct SpectrumSummary {
    n: f64,
    eigenvalues: Vec<f64>,
    alphas: Vec<f64>,
    diameter: f64,
    mass: f64,
    base_dimension: f64,
    obata_margin: f64,
    admissible: bool,
    sharp: bool,
}

fn spectrum(base: &BaseArgs, count: usize) -> Result<()> {
    let cs = cross_section(base, count)?;
    let cone = cone(base, cs)?;
    let cs = cone.cross_section();
    let obata = cone.obata()?;
    let summary = SpectrumSummary {
        n: cone.dimension(),
        eigenvalues: cs.eigenvalues().to_vec(),
        alphas: cone.alphas().to_vec(),
        diameter: cs.diameter(),
        mass: cs.mass(),
        base_dimension: cs.base_dimension(),
        obata_margin: obata.margin,
        admissible: obata.passed,
        sharp: is_sharp(cs),
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn energy(
    base: &BaseArgs,
    index: Option<usize>,
    mode: u32,
    coefficient: f64,
    radii: &[f64],
) -> Result<()> {
    let index = match index {
        Some(i) => i,
        None if base.beta.is_some() => {
            if mode == 0 {
                return Err(Invalid::new("--mode", "frequency must be at least 1").into());
            }
            2 * mode as usize - 1
        }
        None => 1,
    };
    if index == 0 {
        return Err(Invalid::new(
            "--index",
            "the constant mode carries no energy; use an index ≥ 1",
        )
        .into());
    }
    let cs = cross_section(base, index + 1)?;
    if index >= cs.len() {
        return Err(Invalid::new(
            "--index",
            format!("spectrum lists only {} eigenvalues", cs.len()),
        )
        .into());
    }
    let exp = HarmonicExpansion::single(cone(base, cs)?, index, coefficient)?;
    // validate every radius before printing anything
    let rows = radii
        .iter()
        .map(|&r| Ok((r, ball_energy(&exp, r)?, mean_ball_energy(&exp, r)?)))
        .collect::<conelab::Result<Vec<_>>>()?;
    println!("radius,energy,mean_energy");
    for (r, e, m) in rows {
        println!("{r},{e},{m}");
    }
    Ok(())
}

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use fracrev::chain::{assemble_jacobi, check_persymmetry, couplings, couplings_even};
use fracrev::deform::{conjugate_with_residual, deformed_entries, involution_defect, q_symmetry_defect};
use fracrev::dynamics::{
    block_form_deviation, one_excitation_oracle, transfer_fidelity, verify_fr_with, Evolution, DEFAULT_TOL,
    ORACLE_MAX_N,
};
use fracrev::io::{
    load_table, records_to_csv, solutions_to_json, table_to_csv_string, time_rows, to_json,
    write_profile_csv, write_time_series_csv, SolutionRecord,
};
use fracrev::params::{solve_diophantine_with, FrSolution};
use fracrev::spectral::{bilattice, eigensystem, mirror_signature};
use fracrev::surgery::remove_top_level;
use fracrev::{
    ChainParams, CouplingTable, DeformationAngle, FrReport, Parity, Rational, Spectrum, Variant,
};
use serde::Serialize;

use crate::{Cli, Command, Format, ModelArgs, SolutionArgs};

/// Tolerance for the table-level oracles of `surgery` and `deform`.
const CHECK_TOL: f64 = 1e-10;

/// Largest revival time (over pi) tried by `report` when none is given.
const REPORT_ALPHA1_MAX: i64 = 64;

pub fn run(cli: Cli) -> Result<bool> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Search {
            alpha1_max,
            beta1_max,
            pst_only,
            theta,
        } => search(out, cli.format, alpha1_max, beta1_max, pst_only, theta),
        Command::Build { model, plot_data } => build(out, cli.format, &model, plot_data.as_deref()),
        Command::Verify {
            model,
            solution,
            from_csv,
            pst,
            block,
            overrides,
        } => {
            let tol = cli.tol.unwrap_or(DEFAULT_TOL);
            let sol = resolve_solution(&model, &solution)?;
            let mut table = match &from_csv {
                Some(path) => read_csv(path)?,
                None => {
                    let n = model.n.ok_or_else(|| anyhow!("-N is required without --from-csv"))?;
                    couplings(&params_for(sol.a, sol.c, n, &model)?)?
                }
            };
            let mut applied = Vec::new();
            for o in &overrides {
                table = o.apply(&table).map_err(|e| anyhow!(e))?;
                applied.push(format!(
                    "{}{}{}{}",
                    if o.coupling { 'J' } else { 'B' },
                    o.index,
                    o.op,
                    o.value
                ));
            }
            verify(out, &table, &sol, tol, pst, block, applied)
        }
        Command::Evolve {
            model,
            from_csv,
            t_max,
            samples,
        } => {
            let table = model_or_csv(&model, from_csv.as_deref())?;
            let ev = Evolution::new(&assemble_jacobi(&table))?;
            let series = ev.sample(t_max, samples as usize);
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_time_series_csv(&series, &mut buf)?;
                    String::from_utf8(buf)?
                }
                Format::Json => to_json(&time_rows(&series))?,
            };
            emit(out, &text)?;
            Ok(true)
        }
        Command::Surgery { model, check } => {
            surgery(out, cli.format, &model, check, cli.tol.unwrap_or(CHECK_TOL))
        }
        Command::Deform {
            model,
            from_csv,
            sigma,
            alpha,
            sidecar,
            check,
        } => {
            let table = model_or_csv(&model, from_csv.as_deref())?;
            let parity = Parity::of(table.n());
            let angle = match (sigma, alpha) {
                (Some(s), _) => DeformationAngle::from_sigma(s, parity),
                (None, Some(a)) => DeformationAngle::from_alpha(a, parity)?,
                (None, None) => bail!("one of --sigma or --alpha is required"),
            };
            let sidecar = sidecar.or_else(|| out.map(|p| p.with_extension("deform.json")));
            deform(out, cli.format, &table, angle, sidecar.as_deref(), check, cli.tol.unwrap_or(CHECK_TOL))
        }
        Command::Report { model, alpha1 } => report(out, &model, alpha1, cli.tol.unwrap_or(DEFAULT_TOL)),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    let text = if text.ends_with('\n') {
        text.to_owned()
    } else {
        format!("{text}\n")
    };
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn read_csv(path: &Path) -> Result<CouplingTable> {
    load_table(path).with_context(|| format!("reading {}", path.display()))
}

fn params_for(a: Rational, c: Rational, n: usize, model: &ModelArgs) -> Result<ChainParams> {
    Ok(match model.variant {
        Some(v) => ChainParams::new(a, c, n, Variant::from(v))?,
        None => ChainParams::for_length(a, c, n)?,
    })
}

fn params(model: &ModelArgs) -> Result<ChainParams> {
    match (model.a, model.c, model.n) {
        (Some(a), Some(c), Some(n)) => params_for(a, c, n, model),
        _ => bail!("-a, -c and -N are required"),
    }
}

fn model_or_csv(model: &ModelArgs, from_csv: Option<&Path>) -> Result<CouplingTable> {
    match from_csv {
        Some(path) => read_csv(path),
        None => Ok(couplings(&params(model)?)?),
    }
}

fn table_text(table: &CouplingTable, format: Option<Format>) -> Result<String> {
    Ok(match format.unwrap_or(Format::Csv) {
        Format::Csv => table_to_csv_string(table)?,
        Format::Json => to_json(table)?,
    })
}

fn search(
    out: Option<&Path>,
    format: Option<Format>,
    alpha1_max: u32,
    beta1_max: Option<i64>,
    pst_only: bool,
    theta: Option<Rational>,
) -> Result<bool> {
    let mut sols = solve_diophantine_with(alpha1_max, beta1_max);
    if pst_only {
        sols.retain(|s| s.pst_multiple.is_some());
    }
    if let Some(t) = theta {
        sols.retain(|s| s.theta == t);
    }
    let text = match format.unwrap_or(Format::Json) {
        Format::Json => solutions_to_json(&sols)?,
        Format::Csv => {
            let records: Vec<SolutionRecord> = sols.iter().map(SolutionRecord::from).collect();
            records_to_csv(&records)?
        }
    };
    emit(out, &text)?;
    Ok(true)
}

fn build(out: Option<&Path>, format: Option<Format>, model: &ModelArgs, plot: Option<&Path>) -> Result<bool> {
    let table = couplings(&params(model)?)?;
    emit(out, &table_text(&table, format)?)?;
    if let Some(path) = plot {
        let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
        write_profile_csv(&table, file)?;
    }
    Ok(true)
}

/// `(alpha1, beta1, beta2)` from `alpha1` and rational `(a, c)`.
fn betas(alpha1: i64, a: Rational, c: Rational) -> Option<(i64, i64)> {
    let b1 = a * Rational::from_integer(2 * alpha1);
    let b2 = c * Rational::from_integer(2 * alpha1);
    (b1.is_integer() && b2.is_integer()).then(|| (b1.to_integer(), b2.to_integer()))
}

fn resolve_solution(model: &ModelArgs, s: &SolutionArgs) -> Result<FrSolution> {
    let sol = if let Some(alpha1) = s.alpha1 {
        let (Some(b1), Some(b2)) = (s.beta1, s.beta2) else {
            bail!("--alpha1 needs --beta1 and --beta2");
        };
        let sol = FrSolution::from_betas(alpha1, b1, b2)?;
        if model.a.is_some_and(|a| a != sol.a) || model.c.is_some_and(|c| c != sol.c) {
            bail!("-a/-c disagree with the betas (a = {}, c = {})", sol.a, sol.c);
        }
        sol
    } else if let Some(alpha1) = s.t_over_pi {
        let (Some(a), Some(c)) = (model.a, model.c) else {
            bail!("--t-over-pi needs -a and -c");
        };
        let (b1, b2) = betas(alpha1, a, c)
            .ok_or_else(|| anyhow!("2 T/pi a and 2 T/pi c must be integers (T/pi = {alpha1})"))?;
        FrSolution::from_betas(alpha1, b1, b2)?
    } else {
        bail!("identify the solution with --alpha1/--beta1/--beta2 or with -a/-c/--t-over-pi");
    };
    if let Some(dg) = s.dgamma {
        if dg != sol.dgamma() {
            bail!("--dgamma {dg} is inconsistent with the betas (expected {})", sol.dgamma());
        }
    }
    if let Some(theta) = s.theta {
        if theta != sol.theta {
            bail!("--theta {theta} does not satisfy the FR condition (expected {})", sol.theta);
        }
    }
    Ok(sol)
}

#[derive(Serialize)]
struct PstReport {
    multiple: Option<u32>,
    time: Option<f64>,
    fidelity: Option<f64>,
    passes: bool,
}

#[derive(Serialize)]
struct BlockReport {
    deviation: f64,
    passes: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    #[serde(rename = "N")]
    n: usize,
    solution: SolutionRecord,
    overrides: Vec<String>,
    fr: FrReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pst: Option<PstReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    block: Option<BlockReport>,
    passes: bool,
}

fn pst_report(ev: &Evolution, sol: &FrSolution, tol: f64) -> PstReport {
    match sol.pst_multiple {
        Some(q) => {
            let time = f64::from(q) * sol.t();
            let fidelity = transfer_fidelity(ev, time);
            PstReport {
                multiple: Some(q),
                time: Some(time),
                fidelity: Some(fidelity),
                passes: fidelity >= 1.0 - tol,
            }
        }
        None => PstReport {
            multiple: None,
            time: None,
            fidelity: None,
            passes: false,
        },
    }
}

fn verify(
    out: Option<&Path>,
    table: &CouplingTable,
    sol: &FrSolution,
    tol: f64,
    pst: bool,
    block: bool,
    overrides: Vec<String>,
) -> Result<bool> {
    let m = assemble_jacobi(table);
    let ev = Evolution::new(&m)?;
    let fr = verify_fr_with(&ev, sol, tol);
    let pst = pst.then(|| pst_report(&ev, sol, tol));
    let block = if block {
        let deviation = block_form_deviation(&m, sol)?;
        Some(BlockReport {
            deviation,
            passes: deviation <= tol,
        })
    } else {
        None
    };
    let passes = fr.passes
        && pst.as_ref().is_none_or(|p| p.passes)
        && block.as_ref().is_none_or(|b| b.passes);
    let report = VerifyReport {
        n: table.n(),
        solution: SolutionRecord::from(sol),
        overrides,
        fr,
        pst,
        block,
        passes,
    };
    emit(out, &to_json(&report)?)?;
    Ok(passes)
}

#[derive(Serialize)]
struct SurgeryCheck {
    n_in: usize,
    n_out: usize,
    closed_form_residual: f64,
    spectrum_residual: f64,
    persymmetry_deviation: f64,
    tol: f64,
    passes: bool,
}

fn surgery(out: Option<&Path>, format: Option<Format>, model: &ModelArgs, check: bool, tol: f64) -> Result<bool> {
    let p = params(model)?;
    if p.n() % 2 == 0 {
        bail!("surgery needs an odd chain, got N = {}", p.n());
    }
    let cut = remove_top_level(&p)?;
    emit(out, &table_text(&cut, format)?)?;
    if !check {
        return Ok(true);
    }
    let even = couplings_even(&ChainParams::new(p.a(), p.c(), p.n() - 1, Variant::EvenN)?)?;
    let m = assemble_jacobi(&cut);
    let computed = eigensystem(&m)?.eigenvalues;
    let expected = bilattice(&p.with_variant(Variant::OddN)?).values;
    let spectrum_residual = computed
        .iter()
        .zip(&expected)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let closed_form_residual = cut.max_abs_diff(&even);
    let report = SurgeryCheck {
        n_in: p.n(),
        n_out: cut.n(),
        closed_form_residual,
        spectrum_residual,
        persymmetry_deviation: m.persymmetry_deviation(),
        tol,
        passes: closed_form_residual <= tol && spectrum_residual <= tol,
    };
    eprintln!("{}", to_json(&report)?);
    Ok(report.passes)
}

#[derive(Serialize)]
struct DeformCheck {
    #[serde(flatten)]
    angle: DeformationAngle,
    involution_defect: f64,
    off_band_residual: f64,
    closed_form_residual: f64,
    q_symmetry_defect: f64,
    spectrum_shift: f64,
    tol: f64,
    passes: bool,
}

fn deform(
    out: Option<&Path>,
    format: Option<Format>,
    table: &CouplingTable,
    angle: DeformationAngle,
    sidecar: Option<&Path>,
    check: bool,
    tol: f64,
) -> Result<bool> {
    let m = assemble_jacobi(table);
    if !check_persymmetry(&m, CHECK_TOL * (1.0 + m.norm())) {
        return Err(fracrev::Error::NotPersymmetric {
            deviation: m.persymmetry_deviation(),
        }
        .into());
    }
    let deformed = deformed_entries(table, angle.sigma)?;
    emit(out, &table_text(&deformed, format)?)?;
    if let Some(path) = sidecar {
        fs::write(path, to_json(&angle)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    if !check {
        return Ok(true);
    }
    let involution_defect = involution_defect(table.n(), angle.sigma);
    let (band, off_band_residual) = conjugate_with_residual(&m, angle.sigma)?;
    let closed_form_residual = deformed.max_abs_diff(&band.to_table());
    let before = eigensystem(&m)?.eigenvalues;
    let after = eigensystem(&assemble_jacobi(&deformed))?.eigenvalues;
    let spectrum_shift = before
        .iter()
        .zip(&after)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let report = DeformCheck {
        angle,
        involution_defect,
        off_band_residual,
        closed_form_residual,
        q_symmetry_defect: q_symmetry_defect(&band, angle.sigma),
        spectrum_shift,
        tol,
        passes: [involution_defect, off_band_residual, closed_form_residual, spectrum_shift]
            .iter()
            .all(|&r| r <= tol),
    };
    eprintln!("{}", to_json(&report)?);
    Ok(report.passes)
}

#[derive(Serialize)]
struct ModelReport {
    a: String,
    c: String,
    #[serde(rename = "N")]
    n: usize,
    variant: Variant,
    j: f64,
    bilattice: Spectrum,
    eigenvalues: Vec<f64>,
    spectrum_error: f64,
    min_gap: f64,
    persymmetry_deviation: f64,
    mirror_signature: bool,
    oracle_error: Option<f64>,
    solution: Option<SolutionRecord>,
    fr: Option<FrReport>,
    pst: Option<PstReport>,
    passes: bool,
}

fn find_solution(p: &ChainParams, alpha1: Option<i64>) -> Result<Option<FrSolution>> {
    if let Some(alpha1) = alpha1 {
        let (b1, b2) = betas(alpha1, p.a(), p.c())
            .ok_or_else(|| anyhow!("2 alpha1 a and 2 alpha1 c must be integers (alpha1 = {alpha1})"))?;
        return Ok(Some(FrSolution::from_betas(alpha1, b1, b2)?));
    }
    Ok((1..=REPORT_ALPHA1_MAX).find_map(|k| {
        let (b1, b2) = betas(k, p.a(), p.c())?;
        FrSolution::from_betas(k, b1, b2).ok()
    }))
}

fn report(out: Option<&Path>, model: &ModelArgs, alpha1: Option<i64>, tol: f64) -> Result<bool> {
    let p = params(model)?;
    let table = couplings(&p)?;
    let m = assemble_jacobi(&table);
    let es = eigensystem(&m)?;
    let lattice = bilattice(&p);
    let scale = 1.0 + lattice.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let spectrum_error = es
        .eigenvalues
        .iter()
        .zip(&lattice.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let oracle_error = if p.n() <= ORACLE_MAX_N {
        Some((one_excitation_oracle(&table)? - m.to_dense()).amax())
    } else {
        None
    };
    let mirror = mirror_signature(&table, &es.eigenvalues, 1e-8);
    let sol = find_solution(&p, alpha1)?;
    let ev = Evolution::new(&m)?;
    let fr = sol.as_ref().map(|s| verify_fr_with(&ev, s, tol));
    let pst = sol
        .as_ref()
        .filter(|s| s.pst_multiple.is_some())
        .map(|s| pst_report(&ev, s, tol));
    let passes = spectrum_error <= 1e-10 * scale
        && mirror
        && fr.as_ref().is_none_or(|r| r.passes)
        && pst.as_ref().is_none_or(|r| r.passes);
    let report = ModelReport {
        a: fracrev::params::format_rational(p.a()),
        c: fracrev::params::format_rational(p.c()),
        n: p.n(),
        variant: p.variant(),
        j: p.j(),
        min_gap: lattice.min_gap(),
        bilattice: lattice,
        eigenvalues: es.eigenvalues.clone(),
        spectrum_error,
        persymmetry_deviation: m.persymmetry_deviation(),
        mirror_signature: mirror,
        oracle_error,
        solution: sol.as_ref().map(SolutionRecord::from),
        fr,
        pst,
        passes,
    };
    emit(out, &to_json(&report)?)?;
    Ok(passes)
}

use std::path::PathBuf;

use glslab_core::asymptotics::{
    asymptotic_moving_intersection, fujita_check, growth_degree, kappa_volume, restriction_injectivity_check,
    spread_tolerance, verify_main_identity, LimitEstimate, SPREAD_MIN_BOUND,
};
use glslab_core::intersection::{
    modal_count, moving_intersection_at, oracle_count, OracleMode, OracleTrial, SubtorusSpec,
};
use glslab_core::invariants::{
    asymptotic_degree, birational_threshold, iitaka_dimension, image_hilbert, invariant_table, normalized_hilbert,
    GradedSemigroup,
};
use glslab_core::lattice::{IntMatrix, LatticeIndex, SubLattice};
use glslab_core::series::{basepoint_free_at, check_multiplicativity, read_spec, Series, SliceStore};
use glslab_core::verify::VerificationReport;
use glslab_core::{Error as CoreError, Strategy};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::report::{Report, Table};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Table,
    Invariants,
    Volume,
    Degree,
    Movint,
    Verify,
    Oracle,
}

#[derive(Clone, Debug)]
pub struct OracleParams {
    pub prime: u64,
    pub trials: u32,
    pub seed: u64,
    pub mode: OracleMode,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spec_path: PathBuf,
    pub command: Command,
    pub bound: u64,
    pub subtorus: Option<IntMatrix>,
    pub oracle: OracleParams,
    /// Degree for `oracle`; defaults to the first support member.
    pub degree: Option<u64>,
    pub cache_dir: Option<PathBuf>,
    pub force: bool,
    pub strategy: Strategy,
}

/// Parses `"2 3"` or `"1 0; 0 1"` into an integer matrix.
pub fn parse_matrix(text: &str) -> Result<IntMatrix, String> {
    let rows: Vec<Vec<BigInt>> = text
        .split(';')
        .map(|r| r.split_whitespace().map(|x| x.parse::<BigInt>().map_err(|e| format!("`{x}`: {e}"))).collect())
        .collect::<Result<_, _>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if cols == 0 {
        return Err("empty matrix".into());
    }
    IntMatrix::from_rows(cols, rows).map_err(|e| e.to_string())
}

pub fn execute(cfg: &RunConfig) -> Result<Report, CliError> {
    if cfg.bound == 0 {
        return Err(CliError::Config("--bound must be at least 1".into()));
    }
    let spec = read_spec(&cfg.spec_path)?;
    let mut series = Series::new(spec).with_strategy(cfg.strategy);
    if let Some(dir) = &cfg.cache_dir {
        series = series.with_store(SliceStore::new(dir));
    }
    let mut report = Report::new(match cfg.command {
        Command::Validate => "validate",
        Command::Table => "table",
        Command::Invariants => "invariants",
        Command::Volume => "volume",
        Command::Degree => "degree",
        Command::Movint => "movint",
        Command::Verify => "verify",
        Command::Oracle => "oracle",
    });
    report.set("spec", series.name());
    report.set("hash", series.hash());
    report.set("bound", cfg.bound);

    let validation = multiplicativity(&series, cfg.bound);
    match cfg.command {
        Command::Validate => {
            report.set("n", series.ambient().n);
            report.set("d", series.ambient().d);
            report.set("lattice_dim", series.dim());
            report.checks.push(validation);
            return Ok(report);
        }
        Command::Verify => {
            let ok = validation.passed();
            report.checks.push(validation);
            if !ok && !cfg.force {
                report.set("skipped", "identity checks skipped: multiplicativity fails (use --force)");
                return Ok(report);
            }
        }
        _ if !validation.passed() && !cfg.force => {
            return Err(CliError::InvalidSeries(validation.details.join("; ")));
        }
        _ => {}
    }

    let g = GradedSemigroup::new(&series, cfg.bound);
    match cfg.command {
        Command::Table => slice_table(&series, &g, &mut report),
        Command::Invariants => invariants(&g, &mut report)?,
        Command::Volume => {
            let est = kappa_volume(&series, &g)?;
            estimate(&est, &mut report);
        }
        Command::Degree => degree(&g, &mut report)?,
        Command::Movint => {
            let z = subtorus(cfg, &g)?;
            report.set("subtorus", z.matrix());
            let est = asymptotic_moving_intersection(&series, &z, cfg.bound)?;
            estimate(&est, &mut report);
        }
        Command::Oracle => {
            let z = subtorus(cfg, &g)?;
            let m = match cfg.degree {
                Some(m) => m,
                None => first_oracle_degree(&series, &g, &z)?,
            };
            report.set("subtorus", z.matrix());
            oracle(&series, m, &z, &cfg.oracle, &mut report)?;
        }
        Command::Verify => {
            let z = subtorus(cfg, &g)?;
            report.set("subtorus", z.matrix());
            report.set("seed", cfg.oracle.seed);
            verify(&series, &g, &z, cfg, &mut report)?;
        }
        Command::Validate => unreachable!(),
    }
    Ok(report)
}

fn multiplicativity(series: &Series, bound: u64) -> VerificationReport {
    let v = check_multiplicativity(series, bound);
    let mut rep = VerificationReport::new("multiplicativity");
    if !v.origin_ok {
        rep.fail("S_0 is not {0}");
    }
    for w in &v.violations {
        rep.fail(format!("S_{} + S_{} ⊄ S_{}: witness {}", w.k, w.l, w.k + w.l, w.witness));
    }
    if rep.passed() {
        rep.note(format!("S_k + S_l ⊆ S_(k+l) for k + l ≤ {bound}"));
    }
    rep
}

/// `Z = X` when `κ = n`; otherwise the first Vandermonde matrix with rows
/// `(1, t, t², …)` keeping the rank of `Λ_∞`.
fn subtorus(cfg: &RunConfig, g: &GradedSemigroup) -> Result<SubtorusSpec, CliError> {
    let seed = cfg.oracle.seed;
    if let Some(b) = &cfg.subtorus {
        return Ok(SubtorusSpec::new(b.clone(), seed)?);
    }
    let n = g.dim();
    let kappa = g.lambda_inf().rank();
    if kappa == n || kappa == 0 {
        return Ok(SubtorusSpec::identity(n).with_seed(seed));
    }
    for shift in 0..64i64 {
        let rows: Vec<Vec<BigInt>> =
            (0..kappa as i64).map(|i| (0..n as u32).map(|j| BigInt::from(i + 2 + shift).pow(j)).collect()).collect();
        let b = IntMatrix::from_rows(n, rows)?;
        if g.lambda_inf().image(&b)?.rank() == kappa {
            return Ok(SubtorusSpec::new(b, seed)?);
        }
    }
    Err(CliError::Config("no default subtorus found; pass --subtorus".into()))
}

fn index_cell(ix: &LatticeIndex) -> String {
    match ix {
        LatticeIndex::Finite(d) => d.to_string(),
        LatticeIndex::Infinite => "undefined".into(),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn slice_table(series: &Series, g: &GradedSemigroup, report: &mut Report) {
    let mut t = Table::new(&["m", "dim", "basepoint_free"]);
    for m in 0..=g.bound() {
        t.push(vec![m.to_string(), g.slice(m).len().to_string(), basepoint_free_at(series, m).to_string()]);
    }
    report.table = Some(t);
}

fn invariants(g: &GradedSemigroup, report: &mut Report) -> Result<(), CliError> {
    let kappa = iitaka_dimension(g)?;
    report.set("kappa", kappa.kappa());
    report.set("kappa_threshold", opt(kappa.report.threshold));
    let bir = birational_threshold(g)?;
    report.set("lambda_inf", &bir.lambda_inf);
    report.set("birational_threshold", opt(bir.report.threshold));
    if let Ok(d) = asymptotic_degree(g) {
        report.set("delta", opt(d.delta()));
    }
    let mut t = Table::new(&["m", "dim", "kappa_m", "deg_phi_m", "deg_nu_m", "image_nvol"]);
    for r in invariant_table(g) {
        t.push(vec![
            r.m.to_string(),
            r.dim.to_string(),
            opt(r.kappa_m),
            r.deg_phi.as_ref().map(index_cell).unwrap_or_default(),
            r.deg_nu.as_ref().map(index_cell).unwrap_or_default(),
            opt(r.image_nvol),
        ]);
    }
    report.table = Some(t);
    Ok(())
}

fn estimate(est: &LimitEstimate, report: &mut Report) {
    report.set("kappa", est.kappa);
    report.set("last_term", &est.last_term);
    report.set("tail_spread", &est.tail_spread);
    if let Some(c) = &est.closed_form {
        report.set("closed_form", &c.value);
        report.set("closed_form_source", c.provenance);
    }
    let mut t = Table::new(&["m", "raw", "normalized"]);
    for ((m, raw), (_, norm)) in est.raw.iter().zip(&est.terms) {
        t.push(vec![m.to_string(), raw.to_string(), norm.to_string()]);
    }
    report.table = Some(t);
}

fn degree(g: &GradedSemigroup, report: &mut Report) -> Result<(), CliError> {
    let d = asymptotic_degree(g)?;
    let bir = birational_threshold(g)?;
    report.set("delta", opt(d.delta()));
    report.set("degree_threshold", opt(d.report.threshold));
    report.set("birational_threshold", opt(bir.report.threshold));
    report.set("certified", bir.report.certified);
    let mut t = Table::new(&["m", "deg_phi_m", "deg_nu_m"]);
    for ((m, phi), (_, nu)) in d.report.values.iter().zip(&bir.report.values) {
        t.push(vec![m.to_string(), index_cell(phi), index_cell(nu)]);
    }
    report.table = Some(t);
    Ok(())
}

fn first_oracle_degree(series: &Series, g: &GradedSemigroup, z: &SubtorusSpec) -> Result<u64, CliError> {
    for m in g.members() {
        if !moving_intersection_at(series, m, z)?.degenerate {
            return Ok(m);
        }
    }
    Err(CliError::Config("no degree in the window has a nondegenerate restricted hull; pass --m".into()))
}

fn oracle(
    series: &Series,
    m: u64,
    z: &SubtorusSpec,
    p: &OracleParams,
    report: &mut Report,
) -> Result<Vec<OracleTrial>, CliError> {
    let bkk = moving_intersection_at(series, m, z)?.count;
    let trials = oracle_count(series, m, z, p.prime, p.trials, p.mode, series.strategy())?;
    report.set("m", m);
    report.set("bkk", &bkk);
    report.set("mode", format!("{:?}", p.mode).to_lowercase());
    report.set("modal_count", opt(modal_count(&trials)));
    let mut t = Table::new(&["trial", "seed", "p", "count"]);
    for tr in &trials {
        let count = tr.count.map_or_else(|| "infinite".to_string(), |c| c.to_string());
        t.push(vec![tr.trial.to_string(), tr.seed.to_string(), tr.p.to_string(), count]);
    }
    report.table = Some(t);
    Ok(trials)
}

fn rat(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

fn verify(
    series: &Series,
    g: &GradedSemigroup,
    z: &SubtorusSpec,
    cfg: &RunConfig,
    report: &mut Report,
) -> Result<(), CliError> {
    let kappa = iitaka_dimension(g)?;
    let k = kappa.kappa();
    report.set("kappa", k);

    let mut rep = VerificationReport::new("iitaka dimension");
    for (m, km) in &kappa.report.values {
        if *km > k {
            rep.fail(format!("κ_{m} = {km} > κ = {k}"));
        }
        if basepoint_free_at(series, *m) && *km != k {
            rep.fail(format!("S_{m} is basepoint free but κ_{m} = {km} ≠ {k}"));
        }
    }
    rep.note(format!("κ = {k} from m = {}", opt(kappa.report.threshold)));
    report.checks.push(rep);

    let bir = birational_threshold(g)?;
    let mut rep = VerificationReport::new("asymptotic degree");
    match asymptotic_degree(g) {
        Ok(d) => {
            let inf_index = bir.lambda_inf.index_in(&SubLattice::full(g.dim()))?;
            match d.delta() {
                Some(delta) => {
                    if LatticeIndex::Finite(delta.clone()) != inf_index {
                        rep.fail(format!("δ = {delta} but [Z^n : Λ_∞] = {inf_index}"));
                    }
                    for ((m, phi), (_, nu)) in d.report.values.iter().zip(&bir.report.values) {
                        let (LatticeIndex::Finite(phi), LatticeIndex::Finite(nu)) = (phi, nu) else { continue };
                        if phi < delta || *phi != delta * nu {
                            rep.fail(format!("m = {m}: deg φ = {phi} is not δ · deg ν = {delta} · {nu}"));
                        }
                    }
                    rep.note(format!("δ = {delta} from m = {}", opt(d.report.threshold)));
                }
                None => {
                    rep.fail("deg φ_m undefined at the last window member");
                }
            }
        }
        Err(CoreError::Undefined(why)) => rep.vacuous(why),
        Err(e) => return Err(e.into()),
    }
    report.checks.push(rep);

    let mut rep = VerificationReport::new("birational threshold");
    match bir.report.threshold {
        Some(t) => rep.note(format!("deg ν_m = 1 from m = {t}")),
        None => rep.fail(format!("deg ν_m does not settle at 1; last value {}", opt(bir.report.stable_value.as_ref()))),
    }
    for (i, j) in g.divisibility_violations() {
        rep.fail(format!("Λ_{i} ⊄ Λ_{j}"));
    }
    match bir.matches_declared {
        Some(true) => rep.note("window join equals the declared Λ_∞; threshold certified"),
        Some(false) => rep.fail(format!("window join {} differs from the declared Λ_∞", bir.lambda_inf)),
        None => rep.note("no declared Λ_∞; threshold is observational"),
    }
    report.checks.push(rep);

    let vol = kappa_volume(series, g)?;
    let mut rep = VerificationReport::new("kappa volume");
    if let (Some(c), Some((rate, bad))) = (&vol.closed_form, vol.rate_check()) {
        rep.note(format!("closed form {} ({}); last term {}", c.value, c.provenance, vol.last_term));
        if bad.is_empty() {
            rep.note(format!("|term − {}| ≤ C/m on the last quartile, C = {rate}", c.value));
        } else {
            rep.fail(format!("|term − {}| > C/m at m = {bad:?}, C = {rate}", c.value));
        }
    } else if vol.window_bound >= SPREAD_MIN_BOUND {
        rep.note(format!("no closed form; last term {}", vol.last_term));
        match vol.relative_spread_exact() {
            Some(r) if r > spread_tolerance() => rep.fail(format!("relative tail spread {r} > 1/10")),
            Some(r) => rep.note(format!("relative tail spread {r}")),
            None => rep.note("limit is 0"),
        }
    } else {
        rep.note(format!(
            "no closed form; last term {}; spread not assessed below bound {SPREAD_MIN_BOUND}",
            vol.last_term
        ));
    }
    report.checks.push(rep);

    report.checks.push(verify_main_identity(series, z, cfg.bound)?);
    report.checks.push(fujita_check(series, g)?);
    report.checks.push(restriction_injectivity_check(series, z, cfg.bound)?);
    report.checks.push(hilbert_check(series, g)?);

    let mut rep = VerificationReport::new("growth degree");
    match growth_degree(g) {
        Ok(e) if e.degree == k => rep.note(format!("growth degree {} = κ", e.degree)),
        Ok(e) => rep.fail(format!("growth degree {} ≠ κ = {k}", e.degree)),
        Err(CoreError::WindowTooSmall(why)) => rep.vacuous(why),
        Err(e) => return Err(e.into()),
    }
    report.checks.push(rep);

    report.checks.push(oracle_check(series, g, z, &cfg.oracle)?);
    Ok(())
}

/// `|k·S_m| ≤ |S_{km}|` and `|k·S_m| ≤` the normalization count, for the
/// first three members and `k ≤ 6`.
fn hilbert_check(series: &Series, g: &GradedSemigroup) -> Result<VerificationReport, CliError> {
    let mut rep = VerificationReport::new("image hilbert function");
    let mut strict = 0;
    let mut tested = 0;
    for m in g.members().into_iter().take(3) {
        for k in 1..=6u64.min(g.bound() / m) {
            let h = image_hilbert(series, m, k)?;
            let sat = normalized_hilbert(series, m, k)?;
            let full = g.slice(k * m).len();
            tested += 1;
            if h > full {
                rep.fail(format!("m = {m}, k = {k}: |k·S_m| = {h} > |S_km| = {full}"));
            }
            if h > sat {
                rep.fail(format!("m = {m}, k = {k}: |k·S_m| = {h} exceeds the normalization count {sat}"));
            }
            strict += usize::from(h < sat);
        }
    }
    rep.note(format!("{tested} pairs (m, k); normalization strictly larger at {strict}"));
    Ok(rep)
}

fn oracle_check(
    series: &Series,
    g: &GradedSemigroup,
    z: &SubtorusSpec,
    p: &OracleParams,
) -> Result<VerificationReport, CliError> {
    let mut rep = VerificationReport::new("oracle agreement");
    let m = match first_oracle_degree(series, g, z) {
        Ok(m) => m,
        Err(_) => {
            rep.vacuous("no nondegenerate degree in the window");
            return Ok(rep);
        }
    };
    let bkk = moving_intersection_at(series, m, z)?.count;
    let trials = match oracle_count(series, m, z, p.prime, p.trials, p.mode, series.strategy()) {
        Ok(t) => t,
        Err(CoreError::Oracle(why)) => {
            rep.vacuous(format!("m = {m}: {why}"));
            return Ok(rep);
        }
        Err(e) => return Err(e.into()),
    };
    let modal = modal_count(&trials);
    let hits = trials.iter().filter(|t| t.count.is_some() && t.count == modal).count();
    let above: Vec<u32> = trials.iter().filter(|t| t.count.is_none_or(|c| rat(c) > bkk)).map(|t| t.trial).collect();
    if modal.map(rat) != Some(bkk.clone()) {
        rep.fail(format!("m = {m}: modal count {} ≠ {bkk}", opt(modal)));
    }
    if 5 * hits < 4 * trials.len() {
        rep.fail(format!("modal count reached in {hits} of {} trials", trials.len()));
    }
    if !above.is_empty() {
        rep.fail(format!("trials {above:?} exceed {bkk}"));
    }
    rep.note(format!("m = {m}, p = {}: {hits} of {} trials count {bkk}", p.prime, trials.len()));
    Ok(rep)
}

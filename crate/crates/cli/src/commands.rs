use serde::Serialize;
use serde_json::{json, Value};

use ruinlab::analysis::{
    digit_report, holder_exponent, plateau_estimate_exact, plateau_estimates, DigitConfig, PlateauSettings,
};
use ruinlab::exactnum::{format_rational, parse_rational, rational_to_f64, BigRational, DyadicRational};
use ruinlab::gambler::{
    coupled_run, mc_eventual, mc_ruin_by_n, sample_blocks, threshold_scan, verify_closed_form,
    verify_path_identities, z_chain, DigitSettings, StreamRng, DEFAULT_BLOCK_STEP_CAP,
};
use ruinlab::ruinrec::{iterate_step, pointwise_fn, poly_fn, Probability, StepFunction};

use crate::args::*;
use crate::cache::{cache_load, cache_store};
use crate::output::{num, CsvTable};
use crate::CliError;

/// Result of one command, before it is rendered.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub params: Value,
    pub result: Value,
    pub csv: CsvTable,
    /// Failed invariant checks; a nonempty list maps to exit code 4.
    pub failures: Vec<String>,
}

impl Outcome {
    fn new(params: impl Serialize, result: impl Serialize, csv: CsvTable) -> Self {
        Outcome {
            params: serde_json::to_value(params).expect("params serialize"),
            result: serde_json::to_value(result).expect("result serializes"),
            csv,
            failures: Vec::new(),
        }
    }

    fn check(mut self, ok: bool, what: impl Into<String>) -> Self {
        if !ok {
            self.failures.push(what.into());
        }
        self
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::InvalidArgument(msg.into())
}

fn dyadic(name: &str, s: &str) -> Result<DyadicRational, CliError> {
    s.parse()
        .map_err(|_| invalid(format!("{name} must be a dyadic rational (e.g. 3, 2.5, 13/4), got {s:?}")))
}

fn rational(name: &str, s: &str) -> Result<BigRational, CliError> {
    parse_rational(s).map_err(|_| invalid(format!("{name} must be a rational (n/d or decimal), got {s:?}")))
}

fn unit(name: &str, v: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in [0, 1], got {v}")))
    }
}

fn below_half(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v < 0.5 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in (0, 1/2), got {v}")))
    }
}

fn positive(name: &str, v: u64) -> Result<(), CliError> {
    if v > 0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive")))
    }
}

pub fn run_command(g: &GlobalArgs, cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Grid(a) => grid(g, a),
        Command::Poly(a) => poly(a),
        Command::Mc(a) => mc(g, a),
        Command::Eventual(a) => eventual(g, a),
        Command::Holder(a) => holder(a),
        Command::Digits(a) => digits(g, a),
        Command::Couple(a) => couple(g, a),
        Command::Scan(a) => scan(g, a),
        Command::Blocks(a) => blocks(g, a),
        Command::Verify(a) => verify(g, a),
        Command::Plateau(a) => plateau(g, a),
    }
}

pub fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Grid(_) => "grid",
        Command::Poly(_) => "poly",
        Command::Mc(_) => "mc",
        Command::Eventual(_) => "eventual",
        Command::Holder(_) => "holder",
        Command::Digits(_) => "digits",
        Command::Couple(_) => "couple",
        Command::Scan(_) => "scan",
        Command::Blocks(_) => "blocks",
        Command::Verify(_) => "verify",
        Command::Plateau(_) => "plateau",
    }
}

fn step_function<V: Probability>(
    g: &GlobalArgs,
    p: &BigRational,
    n: u32,
    budget: usize,
) -> Result<(StepFunction<V>, bool), CliError> {
    if let Some(dir) = &g.cache_dir {
        if let Some(f) = cache_load::<V>(dir, p, n)? {
            return Ok((f, true));
        }
    }
    let f = iterate_step(n, &V::from_rational(p), budget)?;
    if let Some(dir) = &g.cache_dir {
        cache_store(dir, p, n, &f)?;
    }
    Ok((f, false))
}

/// Sample points: `x_lo`, every breakpoint in `(x_lo, x_hi]`, and `x_hi`.
/// Pieces are `(a, b]`, so the value at a breakpoint is the value of the
/// piece it closes and `x_hi` stands for the piece it falls in.
pub fn grid_rows<V: Probability>(
    f: &StepFunction<V>,
    x_lo: &DyadicRational,
    x_hi: &DyadicRational,
) -> Vec<(DyadicRational, V)> {
    let mut xs = vec![x_lo.clone()];
    xs.extend(f.breakpoints().iter().filter(|b| *b > x_lo && *b <= x_hi).cloned());
    if xs.last() != Some(x_hi) {
        xs.push(x_hi.clone());
    }
    xs.into_iter()
        .map(|x| {
            let v = f.eval(&x);
            (x, v)
        })
        .collect()
}

fn grid(g: &GlobalArgs, a: &GridArgs) -> Result<Outcome, CliError> {
    let p = rational("p", &a.p)?;
    unit("p", rational_to_f64(&p))?;
    let x_lo = dyadic("x_lo", &a.x_lo)?;
    let x_hi = dyadic("x_hi", &a.x_hi)?;
    if x_lo >= x_hi {
        return Err(invalid("need x_lo < x_hi"));
    }
    match g.mode() {
        Mode::Exact => grid_with::<BigRational>(g, a, &p, &x_lo, &x_hi),
        Mode::Fast => grid_with::<f64>(g, a, &p, &x_lo, &x_hi),
    }
}

fn grid_with<V: Probability>(
    g: &GlobalArgs,
    a: &GridArgs,
    p: &BigRational,
    x_lo: &DyadicRational,
    x_hi: &DyadicRational,
) -> Result<Outcome, CliError> {
    let (f, cached) = step_function::<V>(g, p, a.n, a.budget)?;
    let rows = grid_rows(&f, x_lo, x_hi);
    let exact = g.mode() == Mode::Exact;
    let mut csv = CsvTable::new(if exact { &["x", "f", "f_exact"] } else { &["x", "f"] });
    for (x, v) in &rows {
        let mut row = vec![x.to_decimal(usize::MAX), num(v.to_f64())];
        if exact {
            row.push(v.encode());
        }
        csv.push(row);
    }
    let monotone = rows.windows(2).all(|w| w[0].1 >= w[1].1);
    let result = json!({
        "p": format_rational(p),
        "n": a.n,
        "pieces": f.len(),
        "from_cache": cached,
        "record": f.to_record(p, a.n),
    });
    Ok(Outcome::new(a, result, csv).check(monotone, "grid values are not nonincreasing in x"))
}

fn poly(a: &PolyArgs) -> Result<Outcome, CliError> {
    let x = dyadic("x", &a.x)?;
    if x <= DyadicRational::from_int(2) {
        return Err(invalid(format!("x must exceed 2, got {}", a.x)));
    }
    if a.p_samples < 2 {
        return Err(invalid("p_samples must be at least 2"));
    }
    let poly = poly_fn(&x, a.n)?;
    let coefficients = poly.coeff_strings();
    let mut csv = CsvTable::new(&["p", "f", "f_exact"]);
    csv.notes.push(format!("coefficients: {}", coefficients.join(" ")));
    let mut table = Vec::new();
    let denom = 2 * (a.p_samples as i64 - 1);
    let mut prev: Option<BigRational> = None;
    let mut monotone = true;
    for i in 0..a.p_samples as i64 {
        let p = BigRational::new(i.into(), denom.into());
        let f = poly.eval(&p);
        csv.push(vec![num(rational_to_f64(&p)), num(rational_to_f64(&f)), format_rational(&f)]);
        table.push(json!({"p": format_rational(&p), "f": rational_to_f64(&f), "f_exact": format_rational(&f)}));
        monotone &= prev.as_ref().is_none_or(|q| *q <= f);
        prev = Some(f);
    }
    let zero_at_zero = poly.eval(&BigRational::from_integer(0.into())) == BigRational::from_integer(0.into());
    let result = json!({
        "x": x.to_decimal(usize::MAX),
        "n": a.n,
        "coefficients": coefficients,
        "table": table,
    });
    Ok(Outcome::new(a, result, csv)
        .check(zero_at_zero, "f_n(x, 0) is not 0")
        .check(monotone, "f_n(x, p) decreases somewhere on [0, 1/2]"))
}

fn mc(g: &GlobalArgs, a: &McArgs) -> Result<Outcome, CliError> {
    let x = dyadic("x", &a.x)?;
    unit("p", a.p)?;
    positive("samples", a.samples)?;
    let est = mc_ruin_by_n(&x, a.p, a.n, a.samples, g.seed)?;
    // the exact approximant is cheap for short horizons
    let exact = if a.n <= 24 {
        Some(pointwise_fn(&x, &a.p, a.n as u32)?)
    } else {
        None
    };
    let mut csv = CsvTable::new(&["hits", "samples", "estimate", "stderr", "ci95_lo", "ci95_hi", "exact"]);
    csv.push(vec![
        est.hits.to_string(),
        est.samples.to_string(),
        num(est.estimate),
        num(est.stderr),
        num(est.ci95[0]),
        num(est.ci95[1]),
        exact.map(num).unwrap_or_default(),
    ]);
    let covered = exact.is_none_or(|f| est.covers(f, 4.0));
    let result = json!({"estimate": est, "exact_f_n": exact});
    Ok(Outcome::new(a, result, csv).check(covered, "exact f_n lies outside 4 standard errors of the estimate"))
}

fn eventual(g: &GlobalArgs, a: &EventualArgs) -> Result<Outcome, CliError> {
    let x = dyadic("x", &a.x)?;
    unit("p", a.p)?;
    positive("samples", a.samples)?;
    let s = mc_eventual(&x, a.p, a.horizon, a.samples, g.seed)?;
    let mut csv = CsvTable::new(&["samples", "doomed", "ruined", "censored", "doomed_frac", "ruined_frac", "censored_frac"]);
    csv.push(vec![
        s.samples.to_string(),
        s.doomed.to_string(),
        s.ruined.to_string(),
        s.censored.to_string(),
        num(s.doomed_frac),
        num(s.ruined_frac),
        num(s.censored_frac),
    ]);
    let ruin_after_doom = s.ruined <= s.doomed;
    Ok(Outcome::new(a, &s, csv).check(ruin_after_doom, "more ruined than doomed paths"))
}

fn holder(a: &HolderArgs) -> Result<Outcome, CliError> {
    let n = a.n.unwrap_or(a.k_hi + 16);
    let fit = holder_exponent(a.p, a.k_lo, a.k_hi, n)?;
    let mut csv = CsvTable::new(&["k", "one_minus_f", "slope", "local_slope", "band_lo", "band_hi", "in_band"]);
    csv.notes.push(format!("target: {}", num(fit.target)));
    csv.notes.push(format!("fitted: {}", num(fit.fitted)));
    for (i, k) in fit.ks.iter().enumerate() {
        csv.push(vec![
            k.to_string(),
            num(fit.one_minus_f[i]),
            num(fit.slopes[i]),
            num(fit.local_slopes[i]),
            num(fit.band[i][0]),
            num(fit.band[i][1]),
            fit.in_band[i].to_string(),
        ]);
    }
    let in_band = fit.in_band.iter().all(|&b| b);
    let params = json!({"p": a.p, "k_lo": a.k_lo, "k_hi": a.k_hi, "n": n});
    Ok(Outcome::new(params, &fit, csv).check(in_band, "a slope lies outside the sandwich band"))
}

fn digits(g: &GlobalArgs, a: &DigitsArgs) -> Result<Outcome, CliError> {
    below_half("p", a.p)?;
    positive("samples", a.samples)?;
    let h = digit_report(&DigitConfig::new(a.p, a.k, a.samples, a.guard_bits, g.seed))?;
    let mut csv = CsvTable::new(&["digit", "count", "frequency"]);
    csv.notes.push(format!("tv: {}", num(h.tv)));
    csv.notes.push(format!("chi_square: {}", num(h.chi_square)));
    csv.notes.push(format!("discarded: {}", h.discarded));
    for (d, &c) in h.counts.iter().enumerate() {
        csv.push(vec![d.to_string(), c.to_string(), num(c as f64 / h.resolved as f64)]);
    }
    let sum_ok = h.counts.iter().sum::<u64>() == h.resolved;
    let zero_ok = h.zero_window.pass;
    Ok(Outcome::new(a, &h, csv)
        .check(sum_ok, "digit counts do not sum to the resolved total")
        .check(zero_ok, "P(S < 2^-k) falls below (1 - f(3)) (1-p)^k"))
}

fn couple(g: &GlobalArgs, a: &CoupleArgs) -> Result<Outcome, CliError> {
    let x = dyadic("x", &a.x)?;
    unit("p1", a.p1)?;
    unit("p2", a.p2)?;
    if a.p1 > a.p2 {
        return Err(invalid(format!("need p1 <= p2, got {} > {}", a.p1, a.p2)));
    }
    positive("samples", a.samples)?;
    let s = coupled_run(&x, a.p1, a.p2, a.horizon, a.samples, g.seed)?;
    let mut csv = CsvTable::new(&[
        "samples",
        "domination_violations",
        "doomed_p1",
        "doomed_p2",
        "doomed_p2_only",
        "f_diff_estimate",
    ]);
    csv.push(vec![
        s.samples.to_string(),
        s.domination_violations.to_string(),
        s.doomed_p1.to_string(),
        s.doomed_p2.to_string(),
        s.doomed_p2_only.to_string(),
        num(s.f_diff_estimate),
    ]);
    let ok = s.domination_violations == 0;
    Ok(Outcome::new(a, &s, csv).check(ok, "coupled paths violate pathwise domination"))
}

fn scan(g: &GlobalArgs, a: &ScanArgs) -> Result<Outcome, CliError> {
    if a.x_step.is_nan() || a.x_step <= 0.0 || a.x_hi.is_nan() || a.x_hi < a.x_lo {
        return Err(invalid("need x_lo <= x_hi and x_step > 0"));
    }
    positive("samples", a.samples)?;
    let count = ((a.x_hi - a.x_lo) / a.x_step + 1e-9).floor() as usize;
    // rounded to 12 decimals so that 1.3 + 0.1 prints as 1.4
    let xs: Vec<f64> = (0..=count)
        .map(|i| ((a.x_lo + i as f64 * a.x_step) * 1e12).round() / 1e12)
        .collect();
    let rows = threshold_scan(a.rho, a.p, &xs, a.horizon, a.samples, g.seed)?;
    let mut csv = CsvTable::new(&["x", "samples", "doomed", "doomed_frac", "survival"]);
    csv.notes.push(format!("threshold: {}", num(a.rho / (a.rho - 1.0))));
    for r in &rows {
        csv.push(vec![
            num(r.x),
            r.samples.to_string(),
            r.doomed.to_string(),
            num(r.doomed_frac),
            num(r.survival),
        ]);
    }
    let result = json!({"threshold": a.rho / (a.rho - 1.0), "rows": rows});
    Ok(Outcome::new(a, result, csv))
}

fn blocks(g: &GlobalArgs, a: &BlocksArgs) -> Result<Outcome, CliError> {
    if !(0.0..0.5).contains(&a.p) {
        return Err(invalid(format!("p must lie in [0, 1/2), got {}", a.p)));
    }
    positive("samples", a.samples)?;
    let mut csv = CsvTable::new(&["sample", "blocks", "tau", "partial", "consistent"]);
    let mut out = Vec::new();
    let mut all_ok = true;
    for i in 0..a.samples {
        let mut rng = StreamRng::new(g.seed, i);
        let s = sample_blocks(a.p, a.count, DEFAULT_BLOCK_STEP_CAP, &mut rng)?;
        let blocks: Vec<String> = s.blocks.iter().map(|b| b.to_string()).collect();
        let tau: Vec<String> = s.tau.iter().map(|t| t.to_string()).collect();
        let ok = s.is_consistent();
        all_ok &= ok;
        csv.push(vec![
            i.to_string(),
            blocks.join(" "),
            tau.join(" "),
            s.raw_partial.to_string(),
            ok.to_string(),
        ]);
        out.push(json!({"blocks": blocks, "tau": s.tau, "partial": s.raw_partial, "consistent": ok}));
    }
    Ok(Outcome::new(a, json!({ "samples": out }), csv).check(all_ok, "block sums differ from the partial sums of S"))
}

#[derive(Debug, Serialize)]
struct VerifySummary {
    paths: u64,
    closed_form: u64,
    identities: u64,
    blocks_consistent: u64,
    z_sites_checked: u64,
    z_sites_holding: u64,
}

fn verify(g: &GlobalArgs, a: &VerifyArgs) -> Result<Outcome, CliError> {
    let x = dyadic("x", &a.x)?;
    unit("p", a.p)?;
    positive("paths", a.paths)?;
    let mut s = VerifySummary {
        paths: a.paths,
        closed_form: 0,
        identities: 0,
        blocks_consistent: 0,
        z_sites_checked: 0,
        z_sites_holding: 0,
    };
    let block_p = a.p < 0.5;
    for i in 0..a.paths {
        s.closed_form += verify_closed_form(&x, a.p, a.steps, &mut StreamRng::new(g.seed, i))? as u64;
        s.identities += verify_path_identities(&x, a.p, a.steps, &mut StreamRng::new(g.seed, i))? as u64;
        if block_p {
            let mut rng = StreamRng::new(g.seed.wrapping_add(1), i);
            s.blocks_consistent += sample_blocks(a.p, 8, DEFAULT_BLOCK_STEP_CAP, &mut rng)?.is_consistent() as u64;
            if a.p > 0.0 {
                let mut rng = StreamRng::new(g.seed.wrapping_add(2), i);
                let chain = z_chain(a.p, a.k, 6, &DigitSettings::default(), &mut rng)?;
                let (c, h) = chain.recursion_check();
                s.z_sites_checked += c as u64;
                s.z_sites_holding += h as u64;
            }
        }
    }
    let mut csv = CsvTable::new(&["check", "passed", "total"]);
    csv.push(vec!["closed_form".into(), s.closed_form.to_string(), s.paths.to_string()]);
    csv.push(vec!["identities".into(), s.identities.to_string(), s.paths.to_string()]);
    if block_p {
        csv.push(vec!["blocks".into(), s.blocks_consistent.to_string(), s.paths.to_string()]);
        csv.push(vec!["z_chain".into(), s.z_sites_holding.to_string(), s.z_sites_checked.to_string()]);
    }
    let ok_paths = s.closed_form == s.paths && s.identities == s.paths;
    let ok_blocks = !block_p || s.blocks_consistent == s.paths;
    let ok_z = s.z_sites_holding == s.z_sites_checked;
    Ok(Outcome::new(a, &s, csv)
        .check(ok_paths, "closed form or path identities fail on some path")
        .check(ok_blocks, "block sums differ from the partial sums of S")
        .check(ok_z, "Z-chain recursion fails at some resolved site"))
}

fn plateau(g: &GlobalArgs, a: &PlateauArgs) -> Result<Outcome, CliError> {
    let p = rational("p", &a.p)?;
    let tol = rational("tol", &a.tol)?;
    let settings = PlateauSettings {
        n_cap: a.n_cap,
        ..PlateauSettings::default()
    };
    let estimates = match g.mode() {
        Mode::Exact => a
            .x
            .iter()
            .map(|s| plateau_estimate_exact(&dyadic("x", s)?, &p, &tol, &settings).map_err(CliError::from))
            .collect::<Result<Vec<_>, _>>()?,
        Mode::Fast => {
            let xs = a
                .x
                .iter()
                .map(|s| dyadic("x", s).map(|d| d.to_f64()))
                .collect::<Result<Vec<_>, _>>()?;
            plateau_estimates(&xs, rational_to_f64(&p), rational_to_f64(&tol), &settings)?
        }
    };
    let mut csv = CsvTable::new(&["x", "value", "n_used", "gap", "width", "exact"]);
    for e in &estimates {
        csv.push(vec![
            num(e.x),
            num(e.value),
            e.n_used.to_string(),
            num(e.gap),
            num(e.width),
            e.exact.clone().unwrap_or_default(),
        ]);
    }
    let ok = estimates.iter().all(|e| e.gap < e.tolerance && (0.0..=1.0).contains(&e.value));
    Ok(Outcome::new(a, &estimates, csv).check(ok, "a plateau estimate violates gap < tolerance"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rows_cover_every_piece() {
        let f = iterate_step(1, &0.3f64, 1 << 10).unwrap();
        let rows = grid_rows(&f, &DyadicRational::from_int(2), &DyadicRational::from_int(6));
        let xs: Vec<String> = rows.iter().map(|(x, _)| x.to_decimal(20)).collect();
        assert_eq!(xs, ["2", "3", "6"]);
        assert_eq!(rows.iter().map(|r| r.1).collect::<Vec<_>>(), [1.0, 0.3, 0.0]);
    }

    #[test]
    fn grid_rows_below_two() {
        let f = iterate_step(0, &0.3f64, 1 << 10).unwrap();
        let rows = grid_rows(&f, &DyadicRational::from_int(1), &DyadicRational::from_int(2));
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.1 == 1.0));
    }

    #[test]
    fn failed_checks_are_collected() {
        let o = Outcome::new(1, 2, CsvTable::default()).check(true, "fine").check(false, "broken");
        assert_eq!(o.failures, ["broken"]);
    }

    #[test]
    fn argument_validation() {
        assert!(matches!(dyadic("x", "1/3"), Err(CliError::InvalidArgument(_))));
        assert!(rational("p", "0.3").is_ok());
        assert!(unit("p", 1.5).is_err() && below_half("p", 0.5).is_err() && positive("n", 0).is_err());
    }
}

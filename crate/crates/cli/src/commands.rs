use std::fmt::Write as _;

use annuli::cover::{cover_reports, critical_exponent, write_cover_csv};
use annuli::enumerate::{count, dump_ndjson, FamilyKind, FamilySpec};
use annuli::formulas::{
    dim_isotropic, dim_isotropic_limit, dim_weighted, regime, threshold as threshold_value, Branch, DimensionResult, Hypotheses,
    PhiLimit,
};
use annuli::geometry::verify::{check_decomposition, check_sandwich, SampleReport};
use annuli::geometry::{inscribed_cube_at, membership_scan, CubeConstants, RationalPoint, Sign};
use annuli::mtp::{select_exponents, ww_lower_bound, ww_terms, MtpInstance};
use annuli::numeric::{describe, fmt_ratio, to_f64};
use annuli::sweep::{max_abs_diff, run_sweep, write_sweep_csv, SweepRow};
use annuli::Q;
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{broadcast, index, parse_list, parse_q, parse_u64_list, profile};
use crate::output::{Format, Sink};
use crate::{
    CliError, CoverArgs, DimArgs, KindArg, MtpArgs, ScanArgs, SelectArgs, SignArg, StreamArgs, SweepArgs,
    ThresholdArgs, VerifyArgs, VerifyKind,
};

fn qv(x: &Q) -> Value {
    json!({ "exact": fmt_ratio(x), "approx": to_f64(x) })
}

fn qlist(v: &[Q]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(fmt_ratio(x))).collect())
}

fn show_list(v: &[Q]) -> String {
    let exact: Vec<String> = v.iter().map(fmt_ratio).collect();
    let approx: Vec<String> = v.iter().map(|x| format!("{}", to_f64(x))).collect();
    format!("({}) [{}]", exact.join(", "), approx.join(", "))
}

fn envelope<C: Serialize>(command: &str, config: &C, result: Value) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "result": result,
    })
}

fn csv_text(rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

/// Text by default; `--format` picks the JSON envelope or a CSV table.
struct Report<'a, C: Serialize> {
    command: &'a str,
    config: &'a C,
    text: String,
    json: Value,
    csv: Vec<Vec<String>>,
}

impl<C: Serialize> Report<'_, C> {
    fn emit(self, format: Option<Format>, output: Option<&std::path::Path>) -> Result<(), CliError> {
        match format {
            None => Sink::open(output, &format!("{}.txt", self.command))?.write_text(&self.text),
            Some(Format::Json) => Sink::open(output, &format!("{}.json", self.command))?
                .write_json(&envelope(self.command, self.config, self.json)),
            Some(Format::Csv) => {
                Sink::open(output, &format!("{}.csv", self.command))?.write_text(&csv_text(&self.csv)?)
            }
        }
    }
}

fn hyp(h: &Hypotheses) -> String {
    match h {
        Hypotheses::Satisfied => "satisfied".into(),
        Hypotheses::Outside(m) => format!("outside ({m})"),
    }
}

fn one_based(v: &[usize]) -> String {
    v.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn dim_result_json(r: &DimensionResult) -> Value {
    let mut v = json!({
        "value": qv(&r.value),
        "branch": r.branch.to_string(),
        "witness_j": r.witness_j.map(|j| j + 1),
        "witness_k": r.witness_k.as_ref().map(|ks| ks.iter().map(|k| k + 1).collect::<Vec<_>>()),
        "tie": r.tie,
        "hypotheses": hyp(&r.hypotheses),
    });
    if let Branch::WangWu { a_star, partition } = &r.branch {
        v["A_star"] = qv(a_star);
        v["partition"] = Value::String(partition.to_string());
    }
    v
}

fn dim_result_text(r: &DimensionResult) -> String {
    let mut s = format!("dim = {}\nbranch: {}\n", describe(&r.value), r.branch);
    if let Some(j) = r.witness_j {
        let _ = writeln!(s, "witness j: {}", j + 1);
    }
    if let Some(ks) = &r.witness_k {
        let _ = writeln!(s, "witness k(j): {}", one_based(ks));
    }
    if r.tie {
        s.push_str("tie: yes (smallest index reported)\n");
    }
    let _ = writeln!(s, "hypotheses: {}", hyp(&r.hypotheses));
    s
}

pub fn dim(a: &DimArgs) -> Result<(), CliError> {
    let tp = parse_list(&a.tau_psi)?;
    let limit = match a.tau_phi.trim() {
        "inf" | "infinity" => Some(PhiLimit::Infinity),
        _ => None,
    };
    let r = if a.weighted {
        if limit.is_some() {
            return Err(CliError::Usage("--tau-phi inf is only available for the isotropic formula".into()));
        }
        dim_weighted(&profile(a.n, &a.tau_psi, &a.tau_phi)?)?
    } else {
        let n = a.n.ok_or_else(|| CliError::Usage("--n is required".into()))?;
        if tp.iter().any(|t| *t != tp[0]) {
            return Err(CliError::Usage("distinct tau_psi entries need --weighted".into()));
        }
        match limit {
            Some(l) => dim_isotropic_limit(n, &tp[0], l)?,
            None => {
                let tf = parse_list(&a.tau_phi)?;
                if tf.iter().any(|t| *t != tf[0]) {
                    return Err(CliError::Usage("distinct tau_phi entries need --weighted".into()));
                }
                if tf[0] == Q::from_integer(0.into()) {
                    dim_isotropic_limit(n, &tp[0], PhiLimit::Zero)?
                } else {
                    dim_isotropic(n, &tp[0], &tf[0])?
                }
            }
        }
    };
    let csv = vec![
        ["value", "approx", "branch", "witness_j", "witness_k", "tie", "hypotheses"].map(String::from).to_vec(),
        vec![
            fmt_ratio(&r.value),
            to_f64(&r.value).to_string(),
            r.branch.to_string(),
            r.witness_j.map(|j| (j + 1).to_string()).unwrap_or_default(),
            r.witness_k.as_deref().map(one_based).unwrap_or_default(),
            r.tie.to_string(),
            hyp(&r.hypotheses),
        ],
    ];
    Report { command: "dim", config: a, text: dim_result_text(&r), json: dim_result_json(&r), csv }
        .emit(a.format, a.output.as_deref())
}

pub fn threshold(a: &ThresholdArgs) -> Result<(), CliError> {
    let t = threshold_value(a.n)?;
    let mut text = format!("threshold 2/(n-1) = {}\n", describe(&t));
    let mut json = json!({ "threshold": qv(&t) });
    let mut row = vec![fmt_ratio(&t), String::new()];
    if let Some(s) = &a.tau_psi {
        let tp = parse_q(s)?;
        let r = regime(a.n, &tp)?;
        let _ = writeln!(text, "regime at tau_psi = {}: {r}", fmt_ratio(&tp));
        json["regime"] = Value::String(r.to_string());
        row[1] = r.to_string();
    }
    let csv = vec![vec!["threshold".into(), "regime".into()], row];
    Report { command: "threshold", config: a, text, json, csv }.emit(a.format, a.output.as_deref())
}

fn sample_report_json(r: &SampleReport) -> Value {
    json!({
        "samples": r.samples,
        "violations": r.violations,
        "items": r.items.iter().map(|v| json!({ "what": v.what, "x": qlist(&v.x) })).collect::<Vec<_>>(),
    })
}

fn sample_report_text(label: &str, r: &SampleReport) -> String {
    let mut s = format!("{label}: {} samples, {} violations\n", r.samples, r.violations);
    for v in &r.items {
        let _ = writeln!(s, "  {}: x = {}", v.what, show_list(&v.x));
    }
    s
}

pub fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    let (passed, text, json, csv) = match a.kind {
        VerifyKind::Cube => verify_cube(a)?,
        VerifyKind::Decomposition | VerifyKind::Sandwich => {
            let seed = a.seed.ok_or_else(|| CliError::Usage("--seed is required for sampled checks".into()))?;
            if a.samples == 0 {
                return Err(CliError::Usage("--samples must be >= 1".into()));
            }
            let prof = profile(Some(a.n), &a.tau_psi, &a.tau_phi)?;
            let p = match &a.p {
                Some(s) => parse_u64_list(s)?,
                None => vec![0; a.n],
            };
            let p = RationalPoint::new(p, a.q)?;
            if p.n() != a.n {
                return Err(CliError::Usage(format!("--p has {} entries, expected {}", p.n(), a.n)));
            }
            if a.kind == VerifyKind::Sandwich {
                let r = check_sandwich(&p, &prof, a.samples, seed)?;
                let text = sample_report_text("shifted rectangles inside annulus", &r);
                let csv = vec![
                    vec!["check".into(), "samples".into(), "violations".into()],
                    vec!["sandwich".into(), r.samples.to_string(), r.violations.to_string()],
                ];
                (r.violations == 0, text, json!({ "sandwich": sample_report_json(&r) }), csv)
            } else {
                let r = check_decomposition(&p, &prof, a.samples, seed)?;
                let mut text = sample_report_text("annulus covered by rectangles", &r.forward);
                text.push_str(&sample_report_text("rectangles inside annulus", &r.backward));
                let mut json = json!({
                    "forward": sample_report_json(&r.forward),
                    "backward": sample_report_json(&r.backward),
                });
                if let Some((u, v)) = &r.areas {
                    let _ = writeln!(text, "area: union {} vs annulus {}", fmt_ratio(u), fmt_ratio(v));
                    json["area"] = json!({ "union": fmt_ratio(u), "annulus": fmt_ratio(v), "equal": u == v });
                }
                let csv = vec![
                    vec!["check".into(), "samples".into(), "violations".into()],
                    vec!["forward".into(), r.forward.samples.to_string(), r.forward.violations.to_string()],
                    vec!["backward".into(), r.backward.samples.to_string(), r.backward.violations.to_string()],
                ];
                (r.clean(), text, json, csv)
            }
        }
    };
    let ok = passed != a.expect_fail;
    let verdict = match (passed, a.expect_fail) {
        (true, false) => "PASS",
        (false, true) => "FAIL (expected)",
        (true, true) => "PASS (expected a failure)",
        (false, false) => "FAIL",
    };
    let text = format!("{text}verdict: {verdict}\n");
    let mut json = json;
    json["passed"] = Value::Bool(passed);
    json["expect_fail"] = Value::Bool(a.expect_fail);
    Report { command: "verify", config: a, text, json, csv }.emit(a.format, a.output.as_deref())?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Violation(format!("verify: {verdict}")))
    }
}

type Checked = (bool, String, Value, Vec<Vec<String>>);

fn verify_cube(a: &VerifyArgs) -> Result<Checked, CliError> {
    let rho = parse_q(&a.rho)?;
    let constants = if a.printed { CubeConstants::Printed } else { CubeConstants::Corrected };
    let zero = Q::from_integer(0.into());
    let one = Q::from_integer(1.into());
    let cube = inscribed_cube_at(vec![zero; a.n], one, rho.clone(), vec![Sign::Plus; a.n], constants)?;
    let cert = cube.corner_certificate()?;
    let mut text = format!(
        "inscribed cube, {constants} constants, n = {}, rho = {}, r = 1\n",
        a.n,
        describe(&rho)
    );
    let mut csv = vec![["corner", "in_outer", "outer_tight", "outside_inner", "inner_tight"].map(String::from).to_vec()];
    let mut corners = Vec::new();
    for c in &cert.corners {
        let tag: String = c.far.iter().map(|&f| if f { 'F' } else { 'N' }).collect();
        let _ = writeln!(
            text,
            "  corner {tag}: |y-c|_inf <= r {}{}, |y-c|_rho >= r {}{}",
            c.in_outer,
            if c.outer_tight { " (tight)" } else { "" },
            c.outside_inner,
            if c.inner_tight { " (tight)" } else { "" }
        );
        csv.push(vec![
            tag.clone(),
            c.in_outer.to_string(),
            c.outer_tight.to_string(),
            c.outside_inner.to_string(),
            c.inner_tight.to_string(),
        ]);
        corners.push(json!({
            "corner": tag,
            "in_outer": c.in_outer,
            "outer_tight": c.outer_tight,
            "outside_inner": c.outside_inner,
            "inner_tight": c.inner_tight,
        }));
    }
    let _ = writeln!(
        text,
        "outer containment: {}, inner exclusion: {}, tight corners as designed: {}",
        cert.outer_ok, cert.inner_ok, cert.tight_as_designed
    );
    let passed = cert.passed();
    let json = json!({
        "constants": constants.to_string(),
        "corners": corners,
        "outer_ok": cert.outer_ok,
        "inner_ok": cert.inner_ok,
        "tight_as_designed": cert.tight_as_designed,
    });
    Ok((passed, text, json, csv))
}

pub fn mtp(a: &MtpArgs) -> Result<(), CliError> {
    let av = parse_list(&a.a)?;
    let n = av.len();
    let t = broadcast(parse_list(&a.t)?, n, "t")?;
    let delta = match &a.delta {
        Some(d) => broadcast(parse_list(d)?, n, "delta")?,
        None => vec![Q::from_integer(1.into()); n],
    };
    let inst = MtpInstance::new(delta, av, t, parse_q(&a.kappa)?)?;
    let r = ww_lower_bound(&inst);
    let terms = ww_terms(&inst);
    let mut text = dim_result_text(&r);
    if let Branch::WangWu { a_star, partition } = &r.branch {
        let _ = writeln!(text, "A* = {}, partition {partition}", describe(a_star));
    }
    let mut csv = vec![["A", "value", "partition"].map(String::from).to_vec()];
    for term in &terms {
        csv.push(vec![fmt_ratio(&term.big_a), fmt_ratio(&term.value), term.partition.to_string()]);
    }
    let mut json = dim_result_json(&r);
    json["terms"] = terms
        .iter()
        .map(|t| json!({ "A": qv(&t.big_a), "value": qv(&t.value), "partition": t.partition.to_string() }))
        .collect();
    Report { command: "mtp", config: a, text, json, csv }.emit(a.format, a.output.as_deref())
}

pub fn select(a: &SelectArgs) -> Result<(), CliError> {
    let prof = profile(a.profile.n, &a.profile.tau_psi, &a.profile.tau_phi)?;
    let j = index(a.j, prof.n())?;
    let s = select_exponents(&prof, j)?;
    let mut text = format!(
        "j = {}\ncase: {}{}\nb = {}\na = {}\nt = {}\n",
        a.j,
        s.case_tag,
        s.ell.map(|l| format!(", ell = {l}")).unwrap_or_default(),
        show_list(&s.b),
        show_list(&s.a),
        show_list(&s.t)
    );
    if s.nonstrict {
        text.push_str("note: no ell satisfies the strict inequality; non-strict fallback used\n");
    }
    let lb = ww_lower_bound(&s.instance());
    let _ = writeln!(text, "Wang-Wu bound = {}", describe(&lb.value));
    let json = json!({
        "j": a.j,
        "case": s.case_tag.to_string(),
        "ell": s.ell,
        "nonstrict": s.nonstrict,
        "b": qlist(&s.b),
        "a": qlist(&s.a),
        "t": qlist(&s.t),
        "bound": qv(&lb.value),
    });
    let join = |v: &[Q]| v.iter().map(fmt_ratio).collect::<Vec<_>>().join(";");
    let csv = vec![
        ["j", "case", "ell", "nonstrict", "b", "a", "t", "bound"].map(String::from).to_vec(),
        vec![
            a.j.to_string(),
            s.case_tag.to_string(),
            s.ell.map(|l| l.to_string()).unwrap_or_default(),
            s.nonstrict.to_string(),
            join(&s.b),
            join(&s.a),
            join(&s.t),
            fmt_ratio(&lb.value),
        ],
    ];
    Report { command: "select", config: a, text, json, csv }.emit(a.format, a.output.as_deref())
}

pub fn cover(a: &CoverArgs) -> Result<(), CliError> {
    let prof = profile(a.profile.n, &a.profile.tau_psi, &a.profile.tau_phi)?;
    let qs = parse_u64_list(&a.q)?;
    if qs.contains(&0) {
        return Err(CliError::Usage("denominators must be >= 1".into()));
    }
    let band = to_f64(&parse_q(&a.band)?);
    if band < 1.0 {
        return Err(CliError::Usage("--band must be >= 1".into()));
    }
    let reports = cover_reports(&prof, &qs)?;
    let crit = critical_exponent(&prof)?;
    let outside = reports.iter().filter(|r| r.ratio < 1.0 / band || r.ratio > band).count();
    let sink = Sink::open(a.output.as_deref(), &format!("cover.{}", ext(a.format)))?;
    match a.format {
        Format::Csv => {
            let mut sink = sink;
            write_cover_csv(&reports, &mut sink)?;
            sink.finish()?;
        }
        Format::Json => {
            let rows: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "q": r.q, "j": r.j + 1, "k": r.k + 1,
                        "predicted": r.predicted, "measured": r.measured.to_string(),
                        "ratio": r.ratio, "scale": fmt_ratio(&r.scale),
                    })
                })
                .collect();
            let table: Vec<Value> = crit
                .table
                .iter()
                .map(|e| json!({ "j": e.j + 1, "k": e.k + 1, "s": qv(&e.s) }))
                .collect();
            let result = json!({
                "reports": rows,
                "critical_exponent": {
                    "value": qv(&crit.value),
                    "witness_j": crit.witness_j + 1,
                    "witness_k": crit.witness_k + 1,
                    "table": table,
                    "hypotheses": hyp(&crit.hypotheses),
                },
                "outside_band": outside,
            });
            sink.write_json(&envelope("cover", a, result))?;
        }
    }
    eprintln!("critical exponent = {}; {outside} of {} ratios outside [1/{band}, {band}]", describe(&crit.value), reports.len());
    if outside > 0 {
        return Err(CliError::Violation(format!("{outside} cover ratios outside the band")));
    }
    Ok(())
}

fn ext(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn sweep_row_json(r: &SweepRow) -> Value {
    json!({
        "seed": r.seed,
        "n": r.profile.n(),
        "tau_psi": qlist(r.profile.tau_psi()),
        "tau_phi": qlist(r.profile.tau_phi()),
        "dim_formula": qv(&r.dim_formula),
        "dim_mtp": qv(&r.dim_mtp),
        "abs_diff": qv(&r.abs_diff()),
        "witness_j": r.witness_j + 1,
        "A_star": qv(&r.a_star),
    })
}

pub fn sweep(a: &SweepArgs) -> Result<(), CliError> {
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be >= 1".into()));
    }
    if a.tol.is_nan() || a.tol < 0.0 {
        return Err(CliError::Usage("--tol must be a non-negative number".into()));
    }
    let rows = run_sweep(a.trials, a.seed)?;
    let worst = max_abs_diff(&rows);
    let over = rows.iter().filter(|r| to_f64(&r.abs_diff()) > a.tol).count();
    let mut sink = Sink::open(a.output.as_deref(), &format!("sweep.{}", ext(a.format)))?;
    match a.format {
        Format::Csv => {
            write_sweep_csv(&rows, &mut sink)?;
            sink.finish()?;
        }
        Format::Json => {
            let result = json!({
                "rows": rows.iter().map(sweep_row_json).collect::<Vec<_>>(),
                "max_abs_diff": qv(&worst),
                "over_tolerance": over,
            });
            sink.write_json(&envelope("sweep", a, result))?;
        }
    }
    eprintln!("{} trials, max |dim_formula - dim_mtp| = {:e}, {over} over tolerance", rows.len(), to_f64(&worst));
    if over > 0 {
        return Err(CliError::Violation(format!("{over} trials exceed tolerance {:e}", a.tol)));
    }
    Ok(())
}

pub fn stream(a: &StreamArgs) -> Result<(), CliError> {
    let prof = profile(a.profile.n, &a.profile.tau_psi, &a.profile.tau_phi)?;
    let kind = match a.kind {
        KindArg::Annulus => FamilyKind::Annulus,
        KindArg::RectAnnulus => FamilyKind::RectAnnulus,
        KindArg::QuasiAnnulus => FamilyKind::QuasiAnnulus,
        KindArg::Ball => FamilyKind::Ball,
        KindArg::ShiftedRect => {
            let j = a.j.ok_or_else(|| CliError::Usage("--j is required for shifted-rect".into()))?;
            let sign = match a.sign {
                SignArg::Plus => Sign::Plus,
                SignArg::Minus => Sign::Minus,
            };
            FamilyKind::ShiftedRect { j: index(j, prof.n())?, sign }
        }
    };
    let rho = a.rho.as_deref().map(parse_q).transpose()?;
    let spec = FamilySpec::new(kind, prof, rho)?.coprime(a.coprime);
    if a.count_only {
        let c = count(spec.n(), a.q_lo, a.q_hi)?;
        return Sink::open(a.output.as_deref(), "stream-count.txt")?.write_text(&format!("{c}\n"));
    }
    let mut sink = Sink::open(a.output.as_deref(), "stream.ndjson")?;
    let written = dump_ndjson(&spec, a.q_lo, a.q_hi, &mut sink)?;
    sink.finish()?;
    eprintln!("{written} shapes");
    Ok(())
}

pub fn scan(a: &ScanArgs) -> Result<(), CliError> {
    let x = parse_list(&a.x)?;
    let prof = profile(Some(a.profile.n.unwrap_or(x.len())), &a.profile.tau_psi, &a.profile.tau_phi)?;
    let hits = membership_scan(&x, &prof, a.q_max, a.coprime)?;
    let mut text = format!("{} witnesses with q <= {}\n", hits.len(), a.q_max);
    let mut csv = vec![vec!["q".to_string(), "p".to_string()]];
    for h in &hits {
        let _ = writeln!(text, "  {h}");
        csv.push(vec![h.q.to_string(), h.p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")]);
    }
    let json = json!({
        "witnesses": hits.iter().map(|h| json!({ "p": h.p, "q": h.q })).collect::<Vec<_>>(),
    });
    Report { command: "scan", config: a, text, json, csv }.emit(a.format, a.output.as_deref())
}

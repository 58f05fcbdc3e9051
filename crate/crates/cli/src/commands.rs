use rfseries::catalog::{self, FamilySpec, OneVariable, TwoVariable};
use rfseries::dirichlet2::ArithFn1;
use rfseries::engine::{
    build_coeff_table, condition_check, condition_check1, CoeffSource, Delange1, Method,
    TruncationParams,
};
use rfseries::ramanujan::{csum as ramanujan_sum, csum_row};
use rfseries::series::{ConvergenceReport, SeriesContext};

use crate::output::{Cell, OutputRecord};
use crate::{CliError, FamilyArgs, Outcome, EXIT_OK, EXIT_VERIFY_FAILED};

/// Largest `q1, q2` in the verify cross-check between Euler products and closed forms.
const CROSS_CHECK_QMAX: u64 = 30;
const CROSS_CHECK_TOL: f64 = 1e-9;

fn ok(record: OutputRecord) -> Outcome {
    Outcome { record, exit_code: EXIT_OK, diagnostics: Vec::new() }
}

fn with_s(base: String, s: Option<f64>) -> String {
    match s {
        Some(s) => format!("{base} --s {s}"),
        None => base,
    }
}

/// Looks up `name`, or every family for `all`.
fn families(name: &str, s: Option<f64>, params: &TruncationParams) -> Result<Vec<FamilySpec>, CliError> {
    if name == "all" {
        if s.is_some() {
            return Err(CliError::Usage("--s cannot be combined with --function all".into()));
        }
        return Ok(catalog::all_families(params)?);
    }
    Ok(vec![catalog::family(name, s, params)?])
}

pub fn csum(row: Option<&[u64]>, q: Option<u64>, n: Option<u64>) -> Result<Outcome, CliError> {
    let mut record;
    match (row, q, n) {
        (Some(&[qmax, n]), _, _) => {
            record = OutputRecord::new(format!("csum --row {qmax} {n}"), &["q", "n", "value"]);
            let values = csum_row(qmax, n)?;
            for (q, v) in (1..=qmax).zip(values.values()) {
                record.push(vec![q.into(), n.into(), (*v).into()]);
            }
        }
        (None, Some(q), Some(n)) => {
            record = OutputRecord::new(format!("csum {q} {n}"), &["q", "n", "value"]);
            record.push(vec![q.into(), n.into(), ramanujan_sum(q, n)?.into()]);
        }
        _ => return Err(CliError::Usage("csum needs Q N or --row QMAX N".into())),
    }
    Ok(ok(record))
}

const COEFF_COLUMNS: [&str; 5] = ["q1", "q2", "value", "error", "entry"];

pub fn coeff(
    params: &TruncationParams,
    args: &FamilyArgs,
    q1max: u64,
    q2max: Option<u64>,
    method: Method,
) -> Result<Outcome, CliError> {
    let fam = catalog::family(&args.function, args.s, params)?;
    let q2max = q2max.unwrap_or(if fam.as_two().is_some() { q1max } else { 1 });
    let command = with_s(
        format!("coeff --function {} --q1max {q1max} --q2max {q2max} --method {method}", args.function),
        args.s,
    );
    let mut record = OutputRecord::new(command, &COEFF_COLUMNS);
    record.meta("function", fam.label()).meta("identity", fam.identity());
    match &fam {
        FamilySpec::Two(f) => coeff_two(&mut record, f, params, q1max, q2max, method)?,
        FamilySpec::One(f) => {
            if q2max != 1 {
                return Err(CliError::Usage(format!("{} is a one-variable family; use --q2max 1", f.name())));
            }
            coeff_one(&mut record, f, params, q1max, method)?;
        }
    }
    Ok(ok(record))
}

fn entry_label(q1: u64, q2: u64) -> &'static str {
    if q1 == 1 && q2 == 1 {
        "mean_value"
    } else {
        "coefficient"
    }
}

fn coeff_two(
    record: &mut OutputRecord,
    f: &TwoVariable,
    params: &TruncationParams,
    q1max: u64,
    q2max: u64,
    method: Method,
) -> Result<(), CliError> {
    let mean = f.mean().value;
    if method == Method::EulerProduct && (q1max > 1 || q2max > 1) && mean.abs() <= params.tol {
        return Err(CliError::Usage(format!(
            "M(f) = {mean:?} is zero within tol; the Euler-product formula divides by M(f), \
             use --method double_sum"
        )));
    }
    let source = CoeffSource { function: f.function(), mean: Some(*f.mean()), closed_form: Some(f) };
    let table = build_coeff_table(&source, q1max, q2max, method, params)?;
    record.meta("method", table.method());
    if let Some(from) = table.fallback_from() {
        record.meta("fallback_from", from);
    }
    record.meta("mean_value", format!("{mean:?}"));
    for q1 in 1..=q1max {
        for q2 in 1..=q2max {
            let e = table.entry(q1, q2)?;
            let label = match &e.failure {
                Some(err) => Cell::Text(format!("failed: {err}")),
                None => entry_label(q1, q2).into(),
            };
            record.push(vec![q1.into(), q2.into(), e.value.into(), e.error.into(), label]);
        }
    }
    Ok(())
}

fn coeff_one(
    record: &mut OutputRecord,
    f: &OneVariable,
    params: &TruncationParams,
    qmax: u64,
    method: Method,
) -> Result<(), CliError> {
    record.meta("method", method);
    let compute: Box<dyn Fn(u64) -> rfseries::Result<f64>> = match method {
        Method::ClosedForm => Box::new(|q| f.closed_coefficient(q)),
        Method::EulerProduct => {
            let d = Delange1::new(f.function(), params)?;
            Box::new(move |q| d.coefficient(q))
        }
        Method::DoubleSum => {
            // Dropping the local data forces the series over multiples of q.
            let g = f.function().clone();
            let plain = ArithFn1::new(g.name().to_string(), move |n| g.eval(n));
            let d = Delange1::new(&plain, params)?;
            Box::new(move |q| d.coefficient(q))
        }
    };
    for q in 1..=qmax {
        let (value, label) = match compute(q) {
            Ok(v) => (v, entry_label(q, 1).into()),
            Err(e) => (f64::NAN, Cell::Text(format!("failed: {e}"))),
        };
        record.push(vec![q.into(), Cell::Empty, value.into(), Cell::Empty, label]);
    }
    Ok(())
}

pub fn mean(params: &TruncationParams, name: &str, s: Option<f64>) -> Result<Outcome, CliError> {
    let columns = ["function", "mean_value", "error_proxy", "primes_used", "reference", "product"];
    let mut record = OutputRecord::new(with_s(format!("mean --function {name}"), s), &columns);
    for fam in families(name, s, params)? {
        match &fam {
            FamilySpec::Two(f) => {
                let m = f.mean();
                record.push(vec![
                    fam.label().into(),
                    m.value.into(),
                    m.error_proxy.into(),
                    (m.primes_used as u64).into(),
                    f.mean_reference().into(),
                    f.mean_product().into(),
                ]);
            }
            FamilySpec::One(f) => {
                let d = Delange1::new(f.function(), params)?;
                let m = d.mean().copied();
                record.push(vec![
                    fam.label().into(),
                    m.map(|m| m.value).into(),
                    m.map(|m| m.error_proxy).into(),
                    m.map(|m| m.primes_used as u64).into(),
                    f.mean_reference().into(),
                    Cell::Empty,
                ]);
            }
        }
    }
    Ok(ok(record))
}

pub fn check(params: &TruncationParams, args: &FamilyArgs) -> Result<Outcome, CliError> {
    let fam = catalog::family(&args.function, args.s, params)?;
    let report = match &fam {
        FamilySpec::Two(f) => condition_check(f.function(), params)?,
        FamilySpec::One(f) => condition_check1(f.function(), params)?,
    };
    let command = with_s(format!("check --function {}", args.function), args.s);
    let mut record = OutputRecord::new(command, &["prime_cutoff", "partial_sum"]);
    record.meta("function", fam.label()).meta("verdict", report.verdict.as_str());
    for (p, s) in report.checkpoints {
        record.push(vec![p.into(), s.into()]);
    }
    Ok(ok(record))
}

pub fn eval(params: &TruncationParams, args: &FamilyArgs, n1: u64, n2: Option<u64>) -> Result<Outcome, CliError> {
    let fam = catalog::family(&args.function, args.s, params)?;
    let n2 = match (&fam, n2) {
        (FamilySpec::Two(_), Some(n2)) => n2,
        (FamilySpec::Two(f), None) => {
            return Err(CliError::Usage(format!("{} needs --n2", f.name())));
        }
        (FamilySpec::One(f), Some(_)) => {
            return Err(CliError::Usage(format!("{} is a one-variable family; drop --n2", f.name())))
        }
        (FamilySpec::One(_), None) => 1,
    };
    let report = SeriesContext::new(&fam, params)?.report(n1, n2)?;
    let n2_flag = if fam.as_two().is_some() { format!(" --n2 {n2}") } else { String::new() };
    let command = with_s(
        format!("eval --function {} --n1 {n1}{n2_flag} --qmax {}", args.function, params.series_qmax),
        args.s,
    );
    let mut record = OutputRecord::new(command, &["qmax", "partial_sum", "abs_error"]);
    record.meta("function", fam.label()).meta("n1", n1);
    if fam.as_two().is_some() {
        record.meta("n2", n2);
    }
    record
        .meta("direct", format!("{:?}", report.direct))
        .meta("tail_bound", format!("{:?}", report.tail_bound))
        .meta("verdict", report.verdict.as_str())
        .meta("source", report.source);
    for c in &report.checkpoints {
        record.push(vec![c.qmax.into(), c.partial.into(), c.error.into()]);
    }
    Ok(ok(record))
}

const VERIFY_COLUMNS: [&str; 11] = [
    "function",
    "n1",
    "n2",
    "direct",
    "partial_first",
    "error_first",
    "partial_last",
    "error_last",
    "tail_bound",
    "verdict",
    "passed",
];

fn verify_row(label: &str, r: &ConvergenceReport) -> Vec<Cell> {
    vec![
        label.into(),
        r.n1.into(),
        r.n2.into(),
        r.direct.into(),
        r.first().partial.into(),
        r.first().error.into(),
        r.last().partial.into(),
        r.last().error.into(),
        r.tail_bound.into(),
        r.verdict.as_str().into(),
        if r.passed() { "yes" } else { "no" }.into(),
    ]
}

/// Largest `|euler_product - closed_form|` over `q1, q2 <= CROSS_CHECK_QMAX`.
fn cross_check(f: &TwoVariable, params: &TruncationParams) -> Result<f64, CliError> {
    let source = CoeffSource { function: f.function(), mean: Some(*f.mean()), closed_form: Some(f) };
    let q = CROSS_CHECK_QMAX;
    let ep = build_coeff_table(&source, q, q, Method::EulerProduct, params)?;
    let cf = build_coeff_table(&source, q, q, Method::ClosedForm, params)?;
    let mut worst = 0.0f64;
    for (a, b) in ep.entries().iter().zip(cf.entries()) {
        let d = (a.value - b.value).abs();
        // NaN marks a failed entry and must fail the check.
        worst = if d.is_nan() { f64::NAN } else { worst.max(d) };
        if worst.is_nan() {
            break;
        }
    }
    Ok(worst)
}

pub fn verify(params: &TruncationParams, name: &str, s: Option<f64>, nmax: u64) -> Result<Outcome, CliError> {
    let command = with_s(format!("verify --function {name} --nmax {nmax} --qmax {}", params.series_qmax), s);
    let mut record = OutputRecord::new(command, &VERIFY_COLUMNS);
    let mut diagnostics = Vec::new();
    let mut all_passed = true;
    for fam in families(name, s, params)? {
        let label = fam.label();
        let outcome = SeriesContext::new(&fam, params)?.verify(nmax)?;
        for r in &outcome.reports {
            record.push(verify_row(&label, r));
            if !r.passed() {
                all_passed = false;
                let n2 = r.n2.map(|v| format!(" n2={v}")).unwrap_or_default();
                diagnostics.push(format!(
                    "FAIL {label} n1={}{n2}: error {:e} (first checkpoint {:e}), bound {:e}, {}",
                    r.n1,
                    r.last().error,
                    r.first().error,
                    r.tail_bound,
                    r.verdict.as_str()
                ));
            }
        }
        let passed = outcome.passed();
        if let Some(f) = fam.as_two() {
            let worst = cross_check(f, params)?;
            let cross_ok = worst <= CROSS_CHECK_TOL;
            record.meta(
                &format!("cross_check {label}"),
                format!("max |euler_product - closed_form| = {worst:e} ({})", if cross_ok { "pass" } else { "fail" }),
            );
            if !cross_ok {
                all_passed = false;
                diagnostics.push(format!("FAIL {label}: euler_product vs closed_form differ by {worst:e}"));
            }
        }
        record.meta(&format!("result {label}"), if passed { "pass" } else { "fail" });
    }
    let exit_code = if all_passed { EXIT_OK } else { EXIT_VERIFY_FAILED };
    record.meta("result", if all_passed { "pass" } else { "fail" });
    Ok(Outcome { record, exit_code, diagnostics })
}

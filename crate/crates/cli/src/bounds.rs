use log::info;
use returnset::bounds::{
    corollary_bound, lemma_bound, lemma_n, recursive_m_with, BoundParams, BoundParamsJson, BoundsConfig, BoundsError,
    EvalMode, MReport,
};
use returnset::{format_rational, parse_rational};
use serde_json::json;

use crate::args::{BoundsArgs, Format, ModeArg};
use crate::error::{data, failure, usage, CliError};
use crate::output::{emit, pretty, read_input, short_rational, SCHEMA};

fn bounds_error(e: BoundsError) -> CliError {
    match e {
        BoundsError::OutOfRange(_) => usage(e),
        _ => failure(e),
    }
}

fn params(args: &BoundsArgs) -> Result<BoundParams, CliError> {
    if let Some(path) = &args.params {
        let j: BoundParamsJson = serde_json::from_str(&read_input(path)?).map_err(data)?;
        return BoundParams::try_from(&j).map_err(bounds_error);
    }
    let text = args.delta.as_deref().ok_or_else(|| usage("--delta is required"))?;
    let delta = parse_rational(text).ok_or_else(|| usage(format!("--delta: cannot parse {text:?}")))?;
    BoundParams::new(delta, args.m, args.d, args.e).map_err(bounds_error)
}

pub fn run(args: &BoundsArgs) -> Result<u8, CliError> {
    let p = params(args)?;
    let config = BoundsConfig { exponent_cap: args.exponent_cap, precision: args.precision };
    let modes: &[EvalMode] = match args.mode {
        ModeArg::Conservative => &[EvalMode::Conservative],
        ModeArg::Floating => &[EvalMode::Floating],
        ModeArg::Both => &[EvalMode::Conservative, EvalMode::Floating],
    };
    let reports = modes
        .iter()
        .map(|&m| recursive_m_with(&p, m, &config))
        .collect::<Result<Vec<MReport>, _>>()
        .map_err(bounds_error)?;
    let n = lemma_n(&p.delta).map_err(bounds_error)?;
    let lb = lemma_bound(&p.delta).map_err(bounds_error)?;
    let cb = corollary_bound(&p.delta).map_err(bounds_error)?;
    info!("bounds: delta = {}, {} mode(s)", format_rational(&p.delta), reports.len());

    let out = args.output.out.as_deref();
    match args.output.format {
        Format::Json => {
            let mut report = json!({
                "schema": SCHEMA,
                "command": "bounds",
                "params": { "delta": format_rational(&p.delta), "m": p.m, "D": p.d, "e": p.e },
                "lemma": { "N": n, "bound": format_rational(&lb) },
                "corollary": { "N": cb.block_count, "k_max": cb.k_max, "bound": format_rational(&cb.q_bound) },
            });
            let obj = report.as_object_mut().expect("object literal");
            for r in &reports {
                obj.insert(mode_name(r).into(), serde_json::to_value(r).expect("report serializes"));
            }
            emit(&pretty(&report), out)?;
        }
        Format::Csv => {
            let mut s = String::from("mode,step,delta,D\n");
            for r in &reports {
                for (i, st) in r.trajectory.iter().enumerate() {
                    s.push_str(&format!("{},{i},{},{}\n", mode_name(r), st.delta, st.d));
                }
            }
            emit(&s, out)?;
        }
        Format::Text => {
            let mut s = format!("lemma: N = {n}, bound = {}\n", short_rational(&format_rational(&lb)));
            s.push_str(&format!(
                "corollary: N = {}, k < {}, bound = {}\n",
                cb.block_count,
                cb.k_max + 1,
                short_rational(&format_rational(&cb.q_bound))
            ));
            for r in &reports {
                s.push_str(&format!("M ({}) = {}\n", mode_name(r), m_text(r)));
            }
            emit(&s, out)?;
        }
    }
    Ok(0)
}

fn mode_name(r: &MReport) -> &'static str {
    match r.mode {
        EvalMode::Conservative => "conservative",
        EvalMode::Floating => "floating",
    }
}

fn m_text(r: &MReport) -> String {
    match (&r.value, r.log2, r.log2_log2) {
        (Some(v), _, _) => short_rational(v).to_string(),
        (None, Some(l), _) => format!("2^{l:.3} (overflow)"),
        (None, None, Some(ll)) => format!("2^2^{ll:.3} (overflow)"),
        (None, None, None) => "overflow".to_string(),
    }
}


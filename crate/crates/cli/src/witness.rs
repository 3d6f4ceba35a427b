use log::info;
use returnset::density::{corollary_witness, lemma1_witness, DensityError};
use returnset::{format_rational, parse_rational, BigRational};
use serde_json::{json, Value};

use crate::args::{Format, WitnessArgs, WitnessModeArg};
use crate::error::{data, usage, CliError};
use crate::output::{emit, parse_window, pretty, read_input, witness_json, SCHEMA};

pub fn run(args: &WitnessArgs) -> Result<u8, CliError> {
    let window = parse_window(&read_input(&args.input)?)?;
    let d = match &args.density {
        Some(s) => parse_rational(s).ok_or_else(|| usage(format!("--density: cannot parse {s:?}")))?,
        None if window.horizon() == 0 || window.is_empty() => return Err(data("window is empty")),
        None => BigRational::new(window.len().into(), window.horizon().into()),
    };
    let result = match args.mode {
        WitnessModeArg::Lemma => lemma1_witness(&window, &d),
        WitnessModeArg::Corollary => corollary_witness(&window, &d),
    };
    // A false density claim still yields a shift, reported without the count guarantee.
    let (w, note) = match result {
        Ok(w) => (w, None),
        Err(DensityError::DensityClaimFalse(w)) => (*w, Some("window has fewer than d·H members")),
        Err(e @ DensityError::InvalidDensity(_)) => return Err(usage(e)),
        Err(e) => return Err(data(e)),
    };
    info!("witness: k = {}, |Q| = {}", w.k, w.q.len());

    let out = args.output.out.as_deref();
    match args.output.format {
        Format::Json => {
            let report = json!({
                "schema": SCHEMA,
                "command": "witness",
                "horizon": window.horizon(),
                "members": window.len(),
                "declared_density": format_rational(&d),
                "witness": witness_json(&w),
                "note": note.map_or(Value::Null, |n| Value::String(n.into())),
            });
            emit(&pretty(&report), out)?;
        }
        Format::Csv => {
            let mut s = String::from("a,a_plus_k\n");
            for &a in w.q.members() {
                s.push_str(&format!("{a},{}\n", a + w.k));
            }
            emit(&s, out)?;
        }
        Format::Text => {
            let q: Vec<String> = w.q.members().iter().map(u64::to_string).collect();
            let mut s = format!("k = {}\nN = {}\n|Q| = {}\nQ = {{{}}}\n", w.k, w.block_size, w.q.len(), q.join(", "));
            if let Some(g) = &w.guaranteed {
                s.push_str(&format!("guaranteed |Q| ≥ {}\n", format_rational(g)));
            }
            if let Some(n) = note {
                s.push_str(&format!("note: {n}\n"));
            }
            emit(&s, out)?;
        }
    }
    Ok(0)
}

use log::info;
use returnset::algebraic::{
    curve_theorem_analyze_with, doubling_lengths, finite_field_return_set, return_set_with, AlgebraicSystem, Field,
    InvarianceConfig, OrbitConfig, SystemJson,
};
use returnset::density::{
    decompose, lemma1_witness, windowed_density, APDecomposition, DecompositionJson, IndexWindow, Verdict,
};
use returnset::finite::{
    find_infinite_ap, forward_return_set, restrict_to_invariant_domain, FiniteSystem, FiniteSystemJson,
};
use returnset::{format_rational, parse_rational, BigRational};
use serde_json::{json, Map, Value};

use crate::args::{AnalyzeArgs, Format};
use crate::error::{failure, usage, CliError, EXIT_INCONCLUSIVE};
use crate::output::{density_csv, density_json, emit, pretty, read_input, short_rational, witness_json, SCHEMA};

struct Analysis {
    kind: &'static str,
    window: IndexWindow,
    decomposition: APDecomposition,
    extra: Map<String, Value>,
}

pub fn run(args: &AnalyzeArgs) -> Result<u8, CliError> {
    let threshold = parse_threshold(&args.threshold)?;
    let text = match (&args.input, &args.system) {
        (Some(path), _) => read_input(path)?,
        (None, Some(inline)) => inline.clone(),
        (None, None) => return Err(usage("one of --input or --system is required")),
    };
    let value: Value = serde_json::from_str(&text).map_err(|e| failure(format!("system JSON: {e}")))?;
    let h = args.horizon;
    let min_len = args.min_len.unwrap_or((h / 4).max(1));
    if min_len == 0 || min_len > h {
        return Err(usage(format!("--min-len must lie in [1, {h}]")));
    }
    let analysis = if value.get("field").is_some() {
        let sys: SystemJson = serde_json::from_value(value).map_err(|e| failure(format!("system JSON: {e}")))?;
        analyze_algebraic(&sys, args, &threshold, min_len)?
    } else if value.get("n").is_some() {
        let sys: FiniteSystemJson = serde_json::from_value(value).map_err(|e| failure(format!("system JSON: {e}")))?;
        analyze_finite(&sys, h)?
    } else {
        return Err(failure("system JSON needs a \"field\" (algebraic) or \"n\" (finite space) key"));
    };

    let lengths = args.lengths.clone().unwrap_or_else(|| doubling_lengths(1, h));
    let density = windowed_density(&analysis.window, &lengths).map_err(usage)?;
    let global = BigRational::new(analysis.window.len().into(), h.into());
    let (witness, witness_error) = if analysis.window.is_empty() {
        (Value::Null, Some("window is empty".to_string()))
    } else {
        match lemma1_witness(&analysis.window, &global) {
            Ok(w) => (witness_json(&w), None),
            Err(e) => (Value::Null, Some(e.to_string())),
        }
    };
    let verdict = analysis.decomposition.verdict;
    info!("analyze: {} members below {h}, verdict {verdict:?}", analysis.window.len());

    let out = args.output.out.as_deref();
    match args.output.format {
        Format::Json => {
            let mut report = json!({
                "schema": SCHEMA,
                "command": "analyze",
                "system": analysis.kind,
                "horizon": h,
                "window": analysis.window,
                "density": density_json(&density),
                "overall_density": format_rational(&global),
                "decomposition": DecompositionJson::from(&analysis.decomposition),
                "decomposition_params": { "threshold": format_rational(&threshold), "min_len": min_len },
                "witness": witness,
            });
            let obj = report.as_object_mut().expect("object literal");
            if let Some(e) = witness_error {
                obj.insert("witness_error".into(), Value::String(e));
            }
            obj.extend(analysis.extra);
            emit(&pretty(&report), out)?;
        }
        Format::Csv => emit(&density_csv(&density), out)?,
        Format::Text => {
            let d = &analysis.decomposition;
            let mut s = format!("system: {}\nhorizon: {h}\nmembers: {}\n", analysis.kind, analysis.window.len());
            for p in returnset::density::density_points(&density) {
                s.push_str(&format!("density at length {}: {}/{} (from {})\n", p.length, p.numerator, p.denominator, p.start));
            }
            for p in d.structured.progressions() {
                s.push_str(&format!("progression: {} mod {} from {}\n", p.residue(), p.modulus(), p.threshold()));
            }
            let exc: Vec<String> = d.structured.exceptional().iter().map(u64::to_string).collect();
            s.push_str(&format!("exceptional: {{{}}}\n", exc.join(", ")));
            s.push_str(&format!("residual: {} members\n", d.residual.len()));
            s.push_str(&format!("verdict: {}\n", verdict_text(verdict)));
            s.push_str(&format!(
                "overall density: {}\n",
                short_rational(&format_rational(&global))
            ));
            emit(&s, out)?;
        }
    }
    Ok(if verdict == Verdict::Inconclusive { EXIT_INCONCLUSIVE } else { 0 })
}

fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::BelowThreshold => "below threshold",
        Verdict::Inconclusive => "inconclusive",
        Verdict::Exact => "exact",
    }
}

fn parse_threshold(s: &str) -> Result<BigRational, CliError> {
    let t = parse_rational(s).ok_or_else(|| usage(format!("--threshold: cannot parse {s:?}")))?;
    let zero = BigRational::from_integer(0.into());
    let one = BigRational::from_integer(1.into());
    if t <= zero || t >= one {
        return Err(usage(format!("--threshold must lie in (0, 1), got {s}")));
    }
    Ok(t)
}

fn analyze_finite(json: &FiniteSystemJson, horizon: u64) -> Result<Analysis, CliError> {
    let mut extra = Map::new();
    let sys: FiniteSystem = if json.domain.is_some() {
        let space = json.space().map_err(failure)?;
        let map = json.map(&space).map_err(failure)?;
        let target = json.target_set().map_err(failure)?;
        let r = restrict_to_invariant_domain(&space, &map, json.start, target).map_err(failure)?;
        extra.insert("invariant_domain".into(), json!(r.invariant.iter().collect::<Vec<_>>()));
        r.system
    } else {
        json.system().map_err(failure)?
    };
    let rs = forward_return_set(&sys, horizon);
    let ap = find_infinite_ap(&sys).map(|ap| json!({ "first": ap.first, "step": ap.step }));
    extra.insert("infinite_progression".into(), ap.unwrap_or(Value::Null));
    Ok(Analysis { kind: "finite", window: rs.window, decomposition: rs.decomposition, extra })
}

fn analyze_algebraic(
    json: &SystemJson,
    args: &AnalyzeArgs,
    threshold: &BigRational,
    min_len: u64,
) -> Result<Analysis, CliError> {
    let sys: AlgebraicSystem = json.system().map_err(failure)?;
    let h = args.horizon;
    let config = OrbitConfig {
        invariance: InvarianceConfig {
            term_cap: args.term_cap,
            degree_cap: args.degree_cap,
            seed: args.seed,
            ..InvarianceConfig::default()
        },
        ..OrbitConfig::default()
    };
    let mut extra = Map::new();
    match sys.map.field() {
        Field::Prime(p) => {
            let ff = finite_field_return_set(&sys.map, &sys.start, &sys.target, h).map_err(failure)?;
            extra.insert("field".into(), json!(format!("F_{p}")));
            extra.insert("lasso".into(), json!({ "tail": ff.tail, "period": ff.period }));
            Ok(Analysis { kind: "algebraic", window: ff.window, decomposition: ff.decomposition, extra })
        }
        Field::Rational => {
            let window = return_set_with(&sys.map, &sys.start, &sys.target, h, &config).map_err(failure)?;
            let decomposition = decompose(&window, threshold, min_len).map_err(failure)?;
            extra.insert("field".into(), json!("Q"));
            if let Some(curve) = curve_section(&sys, h, &config) {
                extra.insert("curve".into(), curve);
            }
            Ok(Analysis { kind: "algebraic", window, decomposition, extra })
        }
    }
}

/// Curve findings for a plane polynomial map with a single target equation.
fn curve_section(sys: &AlgebraicSystem, horizon: u64, config: &OrbitConfig) -> Option<Value> {
    if sys.map.arity() != 2 || sys.target.generators.len() != 1 || sys.map.polynomial_coordinates().is_err() {
        return None;
    }
    let f = &sys.target.generators[0];
    if f.is_zero() {
        return None;
    }
    let value = match curve_theorem_analyze_with(&sys.map, f, &sys.start, horizon, 1, config) {
        Ok(a) => json!({
            "density_estimate": format_rational(&a.density_estimate),
            "k": a.k,
            "candidates": a.candidates,
            "invariance": a.invariance,
            "progression": a.ap_found.map(|(b, a)| json!({ "first": b, "step": a })),
            "irreducibility_verified": a.irreducibility_verified,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Some(value)
}

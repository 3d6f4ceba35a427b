use log::info;
use returnset::density::{generate_apset, generate_fset, APSet, DensityError, FsetTerm, IndexWindow, Progression};
use returnset::parse_rational;

use crate::args::{GenerateArgs, GenerateKind, WindowFormat};
use crate::error::{data, usage, CliError};
use crate::output::emit;

pub fn run(args: &GenerateArgs) -> Result<u8, CliError> {
    let (window, format, out) = match &args.kind {
        GenerateKind::Fset { p, terms, nmax, horizon, format, out } => {
            let terms = parse_terms(terms)?;
            let w = generate_fset(*p, &terms, *nmax, *horizon).map_err(|e| match e {
                DensityError::NonIntegralValue(_) => data(e),
                _ => usage(e),
            })?;
            (w, *format, out)
        }
        GenerateKind::Apset { progressions, exceptional, horizon, format, out } => {
            let s = parse_apset(progressions, exceptional)?;
            (generate_apset(&s, *horizon), *format, out)
        }
    };
    info!("generate: {} members below {}", window.len(), window.horizon());
    emit(&render(&window, format), out.as_deref())?;
    Ok(0)
}

fn render(w: &IndexWindow, format: WindowFormat) -> String {
    match format {
        WindowFormat::Text => w.to_text(),
        WindowFormat::Json => {
            let mut s = serde_json::to_string_pretty(w).expect("window serializes");
            s.push('\n');
            s
        }
    }
}

fn items(list: &str) -> impl Iterator<Item = &str> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_u64(s: &str, what: &str) -> Result<u64, CliError> {
    s.parse().map_err(|_| usage(format!("{what}: cannot parse {s:?}")))
}

/// `"c:ℓ,c:ℓ,…"`.
fn parse_terms(list: &str) -> Result<Vec<FsetTerm>, CliError> {
    let terms = items(list)
        .map(|t| {
            let (c, l) = t.split_once(':').ok_or_else(|| usage(format!("--terms: expected c:l, got {t:?}")))?;
            let coefficient = parse_rational(c).ok_or_else(|| usage(format!("--terms: cannot parse {c:?}")))?;
            let step = l.parse().map_err(|_| usage(format!("--terms: cannot parse {l:?}")))?;
            Ok(FsetTerm { coefficient, step })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    if terms.is_empty() {
        return Err(usage("--terms needs at least one c:l term"));
    }
    Ok(terms)
}

/// `"b:a[:t],…"` is `{b + a·n ≥ t}`; ratio zero stands for the single point `b`.
fn parse_apset(progressions: &str, exceptional: &str) -> Result<APSet, CliError> {
    let mut ps = Vec::new();
    let mut points = Vec::new();
    for item in items(progressions) {
        let parts: Vec<&str> = item.split(':').collect();
        let (b, a, t) = match parts[..] {
            [b, a] => (parse_u64(b, "--progressions")?, parse_u64(a, "--progressions")?, None),
            [b, a, t] => (
                parse_u64(b, "--progressions")?,
                parse_u64(a, "--progressions")?,
                Some(parse_u64(t, "--progressions")?),
            ),
            _ => return Err(usage(format!("--progressions: expected b:a or b:a:t, got {item:?}"))),
        };
        if a == 0 {
            points.push(b);
        } else {
            ps.push(Progression::new(b % a, a, t.unwrap_or(b).max(b)).map_err(usage)?);
        }
    }
    for item in items(exceptional) {
        points.push(parse_u64(item, "--exceptional")?);
    }
    Ok(APSet::new(ps, points))
}

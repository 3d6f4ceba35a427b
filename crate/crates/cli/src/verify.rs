use log::info;
use returnset::density::verify_corollary_inequalities;
use returnset::finite::{exhaustive_verify, FiniteSpaceError, VerifyReport};
use serde_json::{json, Value};

use crate::args::{Format, VerifyArgs};
use crate::error::{failure, usage, CliError, EXIT_BUDGET, EXIT_FAILURE};
use crate::output::{emit, pretty, SCHEMA};

pub fn run(args: &VerifyArgs) -> Result<u8, CliError> {
    let max_points = args.max_points as usize;
    if args.corollary_max < 2 {
        return Err(usage("--corollary-max must be at least 2"));
    }
    let (report, budget_hit) = match exhaustive_verify(max_points, args.budget) {
        Ok(r) => (r, false),
        Err(FiniteSpaceError::BudgetExceeded(r)) => (*r, true),
        Err(e @ FiniteSpaceError::VerifyTooLarge { .. }) => return Err(usage(e)),
        Err(e) => return Err(failure(e)),
    };
    let failed_n = (2..=args.corollary_max)
        .find(|&n| !verify_corollary_inequalities(n).unwrap_or(false));
    info!(
        "verify: {} certificates, complete = {}, corollary grid ok = {}",
        report.certificates.len(),
        report.complete,
        failed_n.is_none()
    );

    let out = args.output.out.as_deref();
    match args.output.format {
        Format::Json => emit(&pretty(&report_json(&report, args.corollary_max, failed_n)), out)?,
        Format::Csv => {
            let mut s = String::from("points,spaces,maps,targets,instances,backward_orbits,partial_domains\n");
            for p in &report.per_points {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    p.points, p.spaces, p.maps, p.targets, p.instances, p.backward_orbits, p.partial_domains
                ));
            }
            emit(&s, out)?;
        }
        Format::Text => {
            let mut s = String::new();
            for p in &report.per_points {
                s.push_str(&format!(
                    "{} points: {} spaces, {} maps, {} instances, {} targets, {} backward orbits, {} partial domains\n",
                    p.points, p.spaces, p.maps, p.instances, p.targets, p.backward_orbits, p.partial_domains
                ));
            }
            s.push_str(&format!("complete: {}\n", report.complete));
            s.push_str(&format!("certificates: {}\n", report.certificates.len()));
            for c in &report.certificates {
                s.push_str(&format!("  {}: {}\n", c.check, c.detail));
            }
            match failed_n {
                None => s.push_str(&format!("corollary inequalities: hold for 2 ≤ N ≤ {}\n", args.corollary_max)),
                Some(n) => s.push_str(&format!("corollary inequalities: fail at N = {n}\n")),
            }
            emit(&s, out)?;
        }
    }
    Ok(if budget_hit {
        EXIT_BUDGET
    } else if report.certificates.is_empty() && failed_n.is_none() {
        0
    } else {
        EXIT_FAILURE
    })
}

fn report_json(report: &VerifyReport, corollary_max: u64, failed_n: Option<u64>) -> Value {
    let mut v = serde_json::to_value(report).expect("report serializes");
    let obj = v.as_object_mut().expect("struct serializes to an object");
    obj.insert("schema".into(), json!(SCHEMA));
    obj.insert("command".into(), json!("verify"));
    obj.insert(
        "corollary_inequalities".into(),
        json!({ "min_n": 2, "max_n": corollary_max, "all_hold": failed_n.is_none(), "first_failure": failed_n }),
    );
    v
}

use std::fmt::Write;

use num_traits::{Signed, Zero};

use crate::{LpProblem, Rational, Relation, Sense};

fn coeff(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}", *r.numer() as f64 / *r.denom() as f64)
    }
}

fn write_terms(out: &mut String, p: &LpProblem, terms: &[(usize, Rational)]) {
    let mut first = true;
    for (v, a) in terms {
        if a.is_zero() {
            continue;
        }
        let sign = if a.is_negative() {
            " -"
        } else if first {
            ""
        } else {
            " +"
        };
        let mag = a.abs();
        let name = &p.variables[*v].name;
        if mag == Rational::from_integer(1) {
            let _ = write!(out, "{sign} {name}");
        } else {
            let _ = write!(out, "{sign} {} {name}", coeff(&mag));
        }
        first = false;
    }
    if first {
        out.push_str(" 0");
    }
}

/// Render `p` in CPLEX LP text format. Non-integer coefficients are written
/// as decimals, so the export is for inspection with external solvers only.
pub fn write_lp_format(p: &LpProblem) -> String {
    let mut out = String::new();
    out.push_str(match p.sense {
        Sense::Maximize => "Maximize\n obj:",
        Sense::Minimize => "Minimize\n obj:",
    });
    write_terms(&mut out, p, &p.objective);
    out.push_str("\nSubject To\n");
    for c in &p.constraints {
        let _ = write!(out, " {}:", c.name);
        write_terms(&mut out, p, &c.coeffs);
        let rel = match c.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, " {rel} {}", coeff(&c.rhs));
    }
    out.push_str("Bounds\n");
    for v in &p.variables {
        match v.upper {
            Some(u) => {
                let _ = writeln!(out, " {} <= {} <= {}", coeff(&v.lower), v.name, coeff(&u));
            }
            None => {
                let _ = writeln!(out, " {} >= {}", v.name, coeff(&v.lower));
            }
        }
    }
    out.push_str("End\n");
    out
}

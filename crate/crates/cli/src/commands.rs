//! One handler per subcommand; each returns a [`Report`].

use ffda::approx::{self, Exponent};
use ffda::badset::{self, Statistic};
use ffda::construct::{self, Check, GrowthSpec};
use ffda::contfrac::{verify_identities, CfExpansion, CfSource, QuotientSpec};
use ffda::ostrowski::{cylinder_of, decompose_poly, enumerate_prefixes, expand_beta, recompose_poly};
use ffda::singularity::{self, Mode};
use ffda::text::{parse_laurent, parse_poly, parse_value, poly_from_value, Value as TextValue};
use ffda::transfer::{self, RationalMatrix};
use ffda::{Error, Field, Laurent, LaurentMatrix, Poly, Result};
use serde_json::{json, Value};

use crate::emit::{self, Report};
use crate::inputs;
use crate::{ApproxAction, BadAction, CfAction, Cmd, Global, MatrixInput, OstrowskiAction, TransferAction};

pub fn run(cmd: &Cmd, g: &Global, f: &Field) -> Result<Report> {
    match cmd {
        Cmd::Cf { action } => cf(action, g, f),
        Cmd::Ostrowski { action } => ostrowski(action, g, f),
        Cmd::Approx { action } => approx_cmd(action, g, f),
        Cmd::Transfer { action } => transfer_cmd(action, g, f),
        Cmd::Construct { omega, nu, levels, verify, lower_max_deg, lattice } => {
            construct_cmd(omega, nu, *levels, verify, *lower_max_deg, *lattice, f)
        }
        Cmd::Singular { alpha, n, c, oracle } => singular(alpha, *n, c, *oracle, g, f),
        Cmd::Bad { action } => bad(action, g, f),
    }
}

fn matrix(input: &MatrixInput, g: &Global, f: &Field) -> Result<LaurentMatrix> {
    inputs::matrix(input.matrix.as_deref(), input.alpha.as_deref(), g.seed, g.prec, f)
}

/// Grows the expansion to `k` quotients or until it ends.
fn grow(cf: &mut CfExpansion, k: usize, f: &Field) -> Result<()> {
    while cf.len() < k && cf.step(f)? {}
    Ok(())
}

fn exponent(e: &Exponent) -> Value {
    json!(e.to_string())
}

fn check(c: &Check) -> Value {
    match c {
        Check::Pass => json!("pass"),
        Check::Fail => json!("fail"),
        Check::Skipped(why) => json!(format!("skipped: {why}")),
    }
}

fn opt<T>(v: Option<T>, g: impl FnOnce(T) -> Value) -> Value {
    v.map_or(Value::Null, g)
}

fn cf(action: &CfAction, g: &Global, f: &Field) -> Result<Report> {
    match action {
        CfAction::Expand { source, max_k } => {
            let mut cf = inputs::expansion(source, g.seed, f)?;
            grow(&mut cf, *max_k, f)?;
            let mut r = Report::new("cf expand", &["k", "A_k", "P_k", "Q_k", "deg_Q_k"]);
            for k in 0..=cf.len().min(*max_k) {
                let a = if k == 0 { Value::Null } else { emit::poly(cf.a(k), f) };
                r.row(vec![json!(k), a, emit::poly(cf.p(k), f), emit::poly(cf.q(k), f), json!(cf.deg_q(k))]);
            }
            r.set("length", cf.len().min(*max_k));
            r.set("end", format!("{:?}", cf.end()));
            Ok(r)
        }
        CfAction::Verify { source, max_k } => {
            let mut cf = inputs::expansion(source, g.seed, f)?;
            grow(&mut cf, *max_k, f)?;
            let mut r = Report::new("cf verify", &["k", "coprime", "monotone", "degree_product", "determinant", "d_recurrence", "d_norm"]);
            for k in 1..=cf.len().min(*max_k) {
                let rep = verify_identities(&mut cf, k, f)?;
                r.require(rep.all_pass(), || format!("convergent identities fail at k = {k}"));
                r.row(vec![
                    json!(k),
                    json!(rep.coprime),
                    json!(rep.monotone),
                    json!(rep.degree_product),
                    json!(rep.determinant),
                    json!(rep.d_recurrence),
                    json!(rep.d_norm),
                ]);
            }
            r.set("all_pass", r.defect.is_none());
            Ok(r)
        }
    }
}

fn ostrowski(action: &OstrowskiAction, g: &Global, f: &Field) -> Result<Report> {
    match action {
        OstrowskiAction::Expand { alpha, beta, depth } => {
            let mut cf = inputs::expansion(alpha, g.seed, f)?;
            let beta = parse_laurent(&inputs::inline_or_file(beta)?, f)?;
            let digits = expand_beta(&beta, &mut cf, *depth, f)?.digits;
            let mut r = Report::new("ostrowski expand", &["i", "digit"]);
            for (i, d) in digits.iter().enumerate() {
                r.row(vec![json!(i + 1), emit::poly(d, f)]);
            }
            let cyl = cylinder_of(&digits, &mut cf, f)?;
            let inside = cyl.contains(&beta, f)?;
            r.require(inside, || "β lies outside the cylinder of its own digits".into());
            r.set("center", emit::laurent(&cyl.center, f));
            r.set("radius_exp", cyl.radius_exp);
            Ok(r)
        }
        OstrowskiAction::Decompose { alpha, poly } => {
            let mut cf = inputs::expansion(alpha, g.seed, f)?;
            let q = parse_poly(&inputs::inline_or_file(poly)?, f)?;
            let target = q.deg().map_or(0, |d| d + 1);
            let mut k = 1;
            loop {
                cf.ensure(k, f)?;
                if cf.deg_q(k) >= target {
                    break;
                }
                k += 1;
            }
            let digits = decompose_poly(&q, &mut cf, k, f)?;
            let back = recompose_poly(&digits, &cf, f);
            let mut r = Report::new("ostrowski decompose", &["i", "digit"]);
            for (i, d) in digits.iter().enumerate() {
                r.row(vec![json!(i + 1), emit::poly(d, f)]);
            }
            r.require(back == q, || "digits do not recompose to Q".into());
            r.set("poly", emit::poly(&q, f));
            Ok(r)
        }
        OstrowskiAction::Cylinders { alpha, depth } => {
            let mut cf = inputs::expansion(alpha, g.seed, f)?;
            let prefixes = enumerate_prefixes(&mut cf, *depth, f)?;
            let mut r = Report::new("ostrowski cylinders", &["prefix", "center", "radius_exp"]);
            for p in &prefixes {
                let c = cylinder_of(p, &mut cf, f)?;
                r.row(vec![emit::poly_vec(p, f), emit::laurent(&c.center, f), json!(c.radius_exp)]);
            }
            r.set("count", prefixes.len());
            Ok(r)
        }
    }
}

fn approx_cmd(action: &ApproxAction, g: &Global, f: &Field) -> Result<Report> {
    match action {
        ApproxAction::Dirichlet { input, c } => {
            let a = matrix(input, g, f)?;
            let s = approx::dirichlet_solve(&a, *c, f)?;
            let mut r = Report::new("approx dirichlet", &["u", "norm", "dist", "dist_bound"]);
            r.row(vec![emit::poly_vec(&s.u, f), emit::norm(s.norm), emit::dist(s.dist), json!(s.dist_bound)]);
            Ok(r)
        }
        ApproxAction::Bestseq { input, height } => {
            let a = matrix(input, g, f)?;
            let seq = approx::best_approx_seq(&a, inputs::height(height)?, f)?;
            let props = approx::check_best_approx_props(&seq, a.rows(), a.cols());
            let mut r = Report::new("approx bestseq", &["i", "y", "y_exp", "m_exp"]);
            for (i, b) in seq.records.iter().enumerate() {
                r.row(vec![json!(i + 1), emit::poly_vec(&b.y, f), json!(b.y_exp), emit::norm(b.m_exp)]);
            }
            r.set("increasing_y", props.increasing_y);
            r.set("decreasing_m", props.decreasing_m);
            r.set("growth", props.growth);
            r.set("literal_growth_failures", json!(props.literal_growth_failures));
            r.set("dirichlet_bound", props.dirichlet_bound);
            r.set("sharpened_bound", json!(props.sharpened_bound));
            r.require(props.all_pass(), || "best approximation properties fail".into());
            Ok(r)
        }
        ApproxAction::Exponents { input, theta, height } => {
            let a = matrix(input, g, f)?;
            let theta = theta.as_deref().map(|t| inputs::theta(t, f)).transpose()?;
            let t = approx::exponent_estimates(&a, theta.as_deref(), inputs::height(height)?, f)?;
            let mut r = Report::new("approx exponents", &["h", "e", "ratio", "argmin"]);
            for row in &t.rows {
                r.row(vec![json!(row.h), json!(row.e), exponent(&row.ratio), emit::poly_vec(&row.argmin, f)]);
            }
            r.set("omega_est", exponent(&t.omega_est));
            r.set("omega_hat_est", exponent(&t.omega_hat_est));
            Ok(r)
        }
    }
}

fn exact_matrix(input: &MatrixInput, g: &Global, f: &Field) -> Result<RationalMatrix> {
    let Some(alpha) = &input.alpha else {
        return RationalMatrix::from_laurent(&matrix(input, g, f)?, f);
    };
    let (num, den) = match inputs::parse_alpha(alpha, g.seed, f)? {
        CfSource::Rational { num, den } => (num, den),
        CfSource::Quotients(QuotientSpec::Finite(v)) => {
            let k = v.len();
            let cf = CfExpansion::expand(CfSource::Quotients(QuotientSpec::Finite(v)), k, f)?;
            (cf.p(k).clone(), cf.q(k).clone())
        }
        _ => return Err(Error::NotExact),
    };
    RationalMatrix::new(1, 1, vec![(num, den)], f)
}

fn transfer_cmd(action: &TransferAction, g: &Global, f: &Field) -> Result<Report> {
    match action {
        TransferAction::Check { input, s, t } => {
            let a = matrix(input, g, f)?;
            let holds = transfer::hypothesis_holds(&a, *s, *t as i64, f)?;
            let mut r = Report::new("transfer check", &[]);
            r.set("s", *s);
            r.set("t", *t);
            r.set("holds", holds);
            Ok(r)
        }
        TransferAction::Solve { input, theta, s, t } => {
            let a = matrix(input, g, f)?;
            let theta = inputs::theta(theta, f)?;
            let sol = transfer::transference_solve(&a, &theta, *s, *t, f)?;
            let mut r = Report::new("transfer solve", &["x", "dist"]);
            r.row(vec![emit::poly_vec(&sol.x, f), emit::dist(sol.dist)]);
            Ok(r)
        }
        TransferAction::Kronecker { input, theta, eps, bound } => {
            let a = matrix(input, g, f)?;
            let theta = inputs::theta(theta, f)?;
            let sol = transfer::kronecker_solve(&a, &theta, *eps, *bound, f)?;
            let mut r = Report::new("transfer kronecker", &["x", "dist"]);
            r.row(vec![emit::poly_vec(&sol.x, f), emit::dist(sol.dist)]);
            Ok(r)
        }
        TransferAction::Rank { input } => {
            let a = exact_matrix(input, g, f)?;
            let gr = transfer::group_rank(&a, f)?;
            let mut r = Report::new("transfer rank", &["basis_vector"]);
            for b in &gr.lattice_basis {
                r.row(vec![emit::poly_vec(b, f)]);
            }
            r.set("rank", gr.rank);
            r.set("full", gr.full);
            r.set("degenerate", gr.degenerate());
            Ok(r)
        }
    }
}

fn construct_cmd(omega: &str, nu: &str, levels: usize, verify: &[String], lower_max_deg: i64, lattice: Option<usize>, f: &Field) -> Result<Report> {
    for v in verify {
        if v != "upper" && v != "lower" {
            return Err(Error::InvalidInput(format!("unknown check '{v}', expected upper or lower")));
        }
    }
    let spec = GrowthSpec::new(inputs::omega(omega)?, inputs::nu(nu)?)?;
    let xi = construct::build_xi(spec, levels, f)?;
    let windows_hold = xi.windows_hold();
    let mut tb = construct::build_theta(xi, f)?;
    let mut r = Report::new("construct", &["n", "deg_Q", "deg_u", "deg_V", "upper", "upper_measured", "lower", "lower_min"]);
    for n in 1..=levels {
        let upper = verify.iter().any(|v| v == "upper").then(|| construct::verify_upper(&mut tb, n, f));
        let lower = if verify.iter().any(|v| v == "lower") && n < levels && tb.deg_v(n) <= lower_max_deg {
            Some(construct::verify_lower(&tb, n, f)?)
        } else {
            None
        };
        if let Some(u) = &upper {
            r.require(!matches!(u.status, Check::Fail), || format!("upper chain fails at n = {n}"));
        }
        if let Some(l) = &lower {
            r.require(!matches!(l.status, Check::Fail), || format!("lower bound fails at n = {n}"));
        }
        let deg_v = if n < levels { json!(tb.deg_v(n)) } else { Value::Null };
        r.row(vec![
            json!(n),
            json!(tb.xi.degrees[n]),
            json!(tb.u_degrees[n]),
            deg_v,
            opt(upper.as_ref(), |u| check(&u.status)),
            opt(upper.as_ref().and_then(|u| u.measured), |m| json!(m)),
            opt(lower.as_ref(), |l| check(&l.status)),
            opt(lower.as_ref().and_then(|l| l.min_exp), emit::norm),
        ]);
    }
    r.set("omega", omega);
    r.set("nu", nu);
    r.set("growth_windows_hold", windows_hold);
    r.set("u_windows_hold", tb.u_windows.iter().all(|w| w.ok));
    r.set("materialized", tb.materialized());
    r.set("prec", tb.prec);
    if let Some(d) = lattice {
        let c = construct::theta_avoids_lattice(&tb, d, f)?;
        r.require(!matches!(c, Check::Fail), || format!("θ meets the lattice below degree {d}"));
        r.set("avoids_lattice", check(&c));
    }
    Ok(r)
}

fn singular(alpha: &str, n: usize, c: &str, oracle: bool, g: &Global, f: &Field) -> Result<Report> {
    let mut cf = inputs::expansion(alpha, g.seed, f)?;
    let c = inputs::constant(c)?;
    let rep = singularity::delta_nc(&mut cf, n, &c, Mode::Criterion, f)?;
    let mut r = Report::new("singular", &["l", "window_k", "solvable"]);
    for &(l, k, ok) in &rep.verdicts {
        r.row(vec![json!(l), json!(k), json!(ok)]);
    }
    if oracle {
        let ex = singularity::delta_nc(&mut cf, n, &c, Mode::Exhaustive, f)?;
        r.require(ex.verdicts == rep.verdicts, || "criterion and exhaustive search disagree".into());
        r.set("oracle_agrees", ex.verdicts == rep.verdicts);
    }
    for iv in &rep.intervals {
        r.require(iv.within_bound, || format!("too many failures in window k = {}", iv.k));
    }
    r.set("N", n);
    r.set("c", emit::ratio(c));
    r.set("delta", rep.delta);
    r.set("delta_over_N", rep.ratio());
    if n > 0 {
        let b = singularity::deficiency_bounds(&mut cf, n, &c, f)?;
        r.set("deficiency_upper", b.upper_over_n);
        r.set("deficiency_upper_qk", b.upper_over_qk);
        r.set("deficiency_lower", b.lower);
        r.set("deficiency_k", b.k);
    }
    Ok(r)
}

fn poly_rows(s: &str, f: &Field) -> Result<Vec<Vec<Poly>>> {
    let bad = || Error::Parse("rows must be a list of polynomial vectors".into());
    match parse_value(&inputs::inline_or_file(s)?)? {
        TextValue::List(rows) => rows
            .iter()
            .map(|row| match row {
                TextValue::List(ps) => ps.iter().map(|p| poly_from_value(p, f)).collect(),
                _ => Err(bad()),
            })
            .collect(),
        _ => Err(bad()),
    }
}

fn statistic(s: &Statistic) -> Value {
    json!(s.to_string())
}

fn bad(action: &BadAction, g: &Global, f: &Field) -> Result<Report> {
    match action {
        BadAction::Certify { input, theta, epsilon, h0, h1 } => {
            let a = matrix(input, g, f)?;
            let theta = match theta {
                Some(t) => inputs::theta(t, f)?,
                None => vec![Laurent::zero(); a.rows()],
            };
            let cert = badset::bad_certify(&a, &theta, inputs::epsilon(epsilon)?, *h0, *h1, f)?;
            let mut r = Report::new("bad certify", &["h", "statistic"]);
            for (h, s) in &cert.shells {
                r.row(vec![json!(h), statistic(s)]);
            }
            r.set("epsilon_exp", emit::ratio(-cert.eps));
            r.set("min_statistic", statistic(&cert.min));
            r.set("argmin", emit::poly_vec(&cert.argmin, f));
            r.set("pass", cert.pass);
            Ok(r)
        }
        BadAction::Survivors { alpha, rows, l, depth, delta } => {
            let (h, from_cf) = match (alpha, rows) {
                (Some(alpha), None) => (best_approx_rows(alpha, *l, *depth, *delta, g, f)?, true),
                (None, Some(rows)) => (poly_rows(rows, f)?, false),
                _ => return Err(Error::InvalidInput("give exactly one of --alpha and --rows".into())),
            };
            let tree = badset::survivor_tree(&h, *delta, *depth, f)?;
            let mut r = Report::new("bad survivors", &["level", "index", "parent", "center"]);
            for lv in &tree.levels {
                for i in 0..lv.centers.len() {
                    let parent = if lv.level == 0 { Value::Null } else { json!(lv.parents[i]) };
                    let center: Vec<Value> = tree.center(lv.level, i).iter().map(|c| emit::laurent(c, f)).collect();
                    r.row(vec![json!(lv.level), json!(i), parent, Value::Array(center)]);
                }
            }
            let degs: Vec<i64> = h.iter().map(|row| row.iter().map(|p| p.deg_or_neg()).max().unwrap_or(-1)).collect();
            let need = if *delta == 1 { *l as i64 } else { 1 + *delta as i64 };
            let spaced = degs.windows(2).take(*depth).all(|w| w[1] - w[0] >= need);
            r.set("rows", json!(h.iter().map(|row| emit::poly_vec(row, f)).collect::<Vec<_>>()));
            r.set("from_best_approximations", from_cf);
            r.set("counts", json!(tree.levels.iter().map(|l| l.centers.len()).collect::<Vec<_>>()));
            r.set("min_children", json!(tree.levels.iter().map(|l| l.min_children.map(|m| m.to_string())).collect::<Vec<_>>()));
            r.set("child_bounds", json!(tree.levels.iter().map(|l| l.child_bound.map(|m| m.to_string())).collect::<Vec<_>>()));
            r.set("sound", tree.sound());
            r.set("counts_ok", tree.counts_ok());
            r.require(tree.sound(), || "a surviving center violates its threshold".into());
            r.require(!spaced || tree.counts_ok(), || "survivor counts fall below the bound".into());
            Ok(r)
        }
        BadAction::Cover { alpha, k0, t, levels, m } => {
            let mut cf = inputs::expansion(alpha, g.seed, f)?;
            let rep = badset::ostro_cover(&mut cf, *k0, *t, *levels, *m, f)?;
            let mut r = Report::new("bad cover", &["i", "k_i", "k_next", "children", "removed", "survivors", "bound"]);
            for lv in &rep.levels {
                r.require(lv.ok, || format!("cover level {} keeps too many cylinders", lv.i));
                r.row(vec![
                    json!(lv.i),
                    json!(lv.k_i),
                    json!(lv.k_next),
                    json!(lv.children.to_string()),
                    json!(lv.removed.to_string()),
                    json!(lv.survivors.to_string()),
                    json!(lv.bound.to_string()),
                ]);
            }
            r.set("k", json!(rep.k));
            r.set("lambda", rep.lambda);
            r.set("s_bound", json!(rep.s_bound));
            Ok(r)
        }
    }
}

/// Rows `Q_{φ(i)-1}` from the extracted subsequence of the best
/// approximations `y_i = Q_{i-1}` of a single number.
fn best_approx_rows(alpha: &str, l: u32, depth: usize, delta: u32, g: &Global, f: &Field) -> Result<Vec<Vec<Poly>>> {
    let mut cf = inputs::expansion(alpha, g.seed, f)?;
    let gap = if delta == 1 { l as i64 } else { 1 + delta as i64 };
    let mut len = depth.max(1) * (gap as usize + 1) + 2;
    loop {
        grow(&mut cf, len, f)?;
        let avail = cf.len() + 1;
        let y: Vec<i64> = (0..avail.min(len)).map(|i| cf.deg_q(i) as i64).collect();
        let phi = if delta == 1 { badset::phi_extract(&y, l)? } else { badset::phi_extract_with(&y, gap, gap)? };
        if phi.indices.len() >= depth {
            return Ok(phi.indices.iter().take(depth.max(1)).map(|&i| vec![cf.q(i - 1).clone()]).collect());
        }
        if avail < len {
            return Err(Error::PrefixTooShort { at: phi.indices.len() + 1 });
        }
        len *= 2;
    }
}

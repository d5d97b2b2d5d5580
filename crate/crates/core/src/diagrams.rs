//! Validated diagram data: short exact sequences, double short exact
//! sequences sharing their three objects, 3x3 commutative diagrams, and
//! integer formal sums of double sequences.
//!
//! Validators return a [`Report`]; violations are data, not faults, so a
//! broken diagram is an ordinary value with a non-empty report.

use crate::category::{
    self, compose, is_admissible_epi, is_admissible_mono, is_zero_mor, kernel, mor_equal, Morphism,
    PresentedObject,
};
use crate::error::{Error, Result};
use crate::linalg::{self, BaseRing};

/// One validation finding, with a location path into the value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

/// Outcome of a validation pass; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            location: location.into(),
            message: message.into(),
        });
    }

    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for v in other.violations {
            self.violations.push(Violation {
                location: if v.location.is_empty() {
                    prefix.to_string()
                } else {
                    format!("{prefix}.{}", v.location)
                },
                message: v.message,
            });
        }
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{}: {}", v.location, v.message)?;
        }
        Ok(())
    }
}

/// A short exact sequence `a' >-> a ->> a''` given by its two arrows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortExactSeq {
    pub f: Morphism,
    pub g: Morphism,
}

impl ShortExactSeq {
    pub fn new(f: Morphism, g: Morphism) -> ShortExactSeq {
        ShortExactSeq { f, g }
    }

    pub fn validate(&self) -> Report {
        validate_ses(&self.f, &self.g)
    }
}

/// Validate one (f, g) pair as a short exact sequence.
pub fn validate_ses(f: &Morphism, g: &Morphism) -> Report {
    let mut r = Report::new();
    if f.dst() != g.src() {
        r.push("ses", "dst(f) and src(g) are different presentations");
        return r;
    }
    for (label, m) in [("ses.f", f), ("ses.g", g)] {
        if !category::well_defined(m) {
            r.push(label, "matrix does not carry relations into relations");
        }
    }
    if !r.is_valid() {
        return r;
    }
    if !is_admissible_mono(f) {
        r.push("ses.f", "not an admissible mono");
    }
    if !is_admissible_epi(g) {
        r.push("ses.g", "not an admissible epi");
    }
    match compose(g, f) {
        Ok(gf) => {
            if !is_zero_mor(&gf) {
                r.push("ses", "g o f is not zero");
            }
        }
        Err(e) => r.push("ses", format!("composition failed: {e}")),
    }
    // ker g inside im f: each kernel generator must lie in the span of the
    // image columns together with the middle object's relations
    let (_, incl) = kernel(g);
    let span = f.map().hstack(f.dst().relations());
    if linalg::solve_matrix(&span, incl.map()).is_none() {
        r.push("ses", "kernel of g is not contained in the image of f");
    }
    r
}

/// Two short exact sequences on the same three objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleSes {
    pub a_prime: PresentedObject,
    pub a: PresentedObject,
    pub a_dprime: PresentedObject,
    pub f1: Morphism,
    pub f2: Morphism,
    pub g1: Morphism,
    pub g2: Morphism,
}

impl DoubleSes {
    pub fn new(
        a_prime: PresentedObject,
        a: PresentedObject,
        a_dprime: PresentedObject,
        f1: Morphism,
        f2: Morphism,
        g1: Morphism,
        g2: Morphism,
    ) -> DoubleSes {
        DoubleSes {
            a_prime,
            a,
            a_dprime,
            f1,
            f2,
            g1,
            g2,
        }
    }

    pub fn ring(&self) -> BaseRing {
        self.a.ring()
    }

    /// Both structures equal: the class-trivial generator.
    pub fn trivial(f: &Morphism, g: &Morphism) -> DoubleSes {
        DoubleSes {
            a_prime: f.src().clone(),
            a: f.dst().clone(),
            a_dprime: g.dst().clone(),
            f1: f.clone(),
            f2: f.clone(),
            g1: g.clone(),
            g2: g.clone(),
        }
    }

    /// Exchange the two structures.
    pub fn swap(&self) -> DoubleSes {
        DoubleSes {
            a_prime: self.a_prime.clone(),
            a: self.a.clone(),
            a_dprime: self.a_dprime.clone(),
            f1: self.f2.clone(),
            f2: self.f1.clone(),
            g1: self.g2.clone(),
            g2: self.g1.clone(),
        }
    }

    pub fn structure(&self, index: usize) -> (&Morphism, &Morphism) {
        match index {
            1 => (&self.f1, &self.g1),
            2 => (&self.f2, &self.g2),
            _ => panic!("structure index must be 1 or 2"),
        }
    }

    pub fn structure_ses(&self, index: usize) -> ShortExactSeq {
        let (f, g) = self.structure(index);
        ShortExactSeq::new(f.clone(), g.clone())
    }
}

pub fn validate_dses(d: &DoubleSes) -> Report {
    let mut r = Report::new();
    for (label, m, src, dst) in [
        ("f1", &d.f1, &d.a_prime, &d.a),
        ("f2", &d.f2, &d.a_prime, &d.a),
        ("g1", &d.g1, &d.a, &d.a_dprime),
        ("g2", &d.g2, &d.a, &d.a_dprime),
    ] {
        if m.src() != src || m.dst() != dst {
            r.push(
                label,
                "arrow endpoints do not match the double sequence's objects",
            );
        }
    }
    if !r.is_valid() {
        return r;
    }
    r.absorb("structure1", validate_ses(&d.f1, &d.g1));
    r.absorb("structure2", validate_ses(&d.f2, &d.g2));
    r
}

/// Highest `j` such that the first `j` of (a', a, a'') lie in F.
pub fn dses_type(d: &DoubleSes) -> u8 {
    if !d.a_prime.is_in_f() {
        0
    } else if !d.a.is_in_f() {
        1
    } else if !d.a_dprime.is_in_f() {
        2
    } else {
        3
    }
}

/// The double sequence `(i_r, i_l; -p_l, p_r)` on `(a, a + a, a)` whose
/// class is trivial.
pub fn lemma_pl_dses(a: &PresentedObject) -> DoubleSes {
    let b = category::biproduct(a, a).expect("biproduct of an object with itself");
    DoubleSes {
        a_prime: a.clone(),
        a: b.sum.clone(),
        a_dprime: a.clone(),
        f1: b.i_r.clone(),
        f2: b.i_l.clone(),
        g1: b.p_l.neg(),
        g2: b.p_r.clone(),
    }
}

/// Blockwise direct sum of two double sequences.
pub fn dses_direct_sum(d: &DoubleSes, e: &DoubleSes) -> Result<DoubleSes> {
    if d.ring() != e.ring() {
        return Err(Error::RingMismatch(
            "direct sum of double sequences over different rings".into(),
        ));
    }
    let a_prime = category::biproduct(&d.a_prime, &e.a_prime)?.sum;
    let a = category::biproduct(&d.a, &e.a)?.sum;
    let a_dprime = category::biproduct(&d.a_dprime, &e.a_dprime)?.sum;
    let block = |x: &Morphism, y: &Morphism, src: &PresentedObject, dst: &PresentedObject| {
        Morphism::new(src.clone(), dst.clone(), x.map().block_diag(y.map()))
    };
    Ok(DoubleSes {
        f1: block(&d.f1, &e.f1, &a_prime, &a)?,
        f2: block(&d.f2, &e.f2, &a_prime, &a)?,
        g1: block(&d.g1, &e.g1, &a, &a_dprime)?,
        g2: block(&d.g2, &e.g2, &a, &a_dprime)?,
        a_prime,
        a,
        a_dprime,
    })
}

/// One doubled edge of a 3x3 diagram. Arrows the source draws once (equality
/// arrows, unsubscripted maps) are stored with both indices equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub m1: Morphism,
    pub m2: Morphism,
}

impl Edge {
    pub fn new(m1: Morphism, m2: Morphism) -> Edge {
        Edge { m1, m2 }
    }

    pub fn single(m: Morphism) -> Edge {
        Edge {
            m1: m.clone(),
            m2: m,
        }
    }

    pub fn get(&self, index: usize) -> &Morphism {
        match index {
            1 => &self.m1,
            2 => &self.m2,
            _ => panic!("edge index must be 1 or 2"),
        }
    }
}

/// Nine objects with doubled edges; rows run left to right, columns run
/// bottom to top (the column double sequences are read `(c, b, a)` as in the
/// defining relation).
///
/// `objects[0]` is the top row `(a', a, a'')`, `objects[2]` the bottom row.
/// `rows[i] = (f_edge, g_edge)` along row `i`; `cols[j] = (f_edge, g_edge)`
/// where the f-edge points from the bottom object to the middle one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeByThree {
    pub objects: [[PresentedObject; 3]; 3],
    pub rows: [(Edge, Edge); 3],
    pub cols: [(Edge, Edge); 3],
}

impl ThreeByThree {
    pub fn row_dses(&self, i: usize) -> DoubleSes {
        let (f, g) = &self.rows[i];
        DoubleSes {
            a_prime: self.objects[i][0].clone(),
            a: self.objects[i][1].clone(),
            a_dprime: self.objects[i][2].clone(),
            f1: f.m1.clone(),
            f2: f.m2.clone(),
            g1: g.m1.clone(),
            g2: g.m2.clone(),
        }
    }

    pub fn col_dses(&self, j: usize) -> DoubleSes {
        let (f, g) = &self.cols[j];
        DoubleSes {
            a_prime: self.objects[2][j].clone(),
            a: self.objects[1][j].clone(),
            a_dprime: self.objects[0][j].clone(),
            f1: f.m1.clone(),
            f2: f.m2.clone(),
            g1: g.m1.clone(),
            g2: g.m2.clone(),
        }
    }

    pub fn h_t(&self) -> DoubleSes {
        self.row_dses(0)
    }

    pub fn h_m(&self) -> DoubleSes {
        self.row_dses(1)
    }

    pub fn h_b(&self) -> DoubleSes {
        self.row_dses(2)
    }

    pub fn v_l(&self) -> DoubleSes {
        self.col_dses(0)
    }

    pub fn v_m(&self) -> DoubleSes {
        self.col_dses(1)
    }

    pub fn v_r(&self) -> DoubleSes {
        self.col_dses(2)
    }
}

pub fn validate_3x3(t: &ThreeByThree) -> Report {
    let mut r = Report::new();
    // edge endpoints against the object grid
    for i in 0..3 {
        let (f, g) = &t.rows[i];
        for (label, e, s, d) in [
            (
                format!("rows[{i}].f"),
                f,
                &t.objects[i][0],
                &t.objects[i][1],
            ),
            (
                format!("rows[{i}].g"),
                g,
                &t.objects[i][1],
                &t.objects[i][2],
            ),
        ] {
            for idx in [1, 2] {
                let m = e.get(idx);
                if m.src() != s || m.dst() != d {
                    r.push(
                        format!("{label}.{idx}"),
                        "edge endpoints do not match the grid",
                    );
                }
            }
        }
    }
    for j in 0..3 {
        let (f, g) = &t.cols[j];
        for (label, e, s, d) in [
            (
                format!("cols[{j}].f"),
                f,
                &t.objects[2][j],
                &t.objects[1][j],
            ),
            (
                format!("cols[{j}].g"),
                g,
                &t.objects[1][j],
                &t.objects[0][j],
            ),
        ] {
            for idx in [1, 2] {
                let m = e.get(idx);
                if m.src() != s || m.dst() != d {
                    r.push(
                        format!("{label}.{idx}"),
                        "edge endpoints do not match the grid",
                    );
                }
            }
        }
    }
    if !r.is_valid() {
        return r;
    }
    for i in 0..3 {
        r.absorb(&format!("row{i}"), validate_dses(&t.row_dses(i)));
    }
    for j in 0..3 {
        r.absorb(&format!("col{j}"), validate_dses(&t.col_dses(j)));
    }
    // index-wise commutation of the four squares
    for idx in [1usize, 2usize] {
        for row in [0usize, 1usize] {
            // horizontal edges of rows `row` and `row+1`, vertical edges of
            // the columns between them
            for (which, h_top, h_bot, v_left, v_right) in [
                (
                    "left",
                    &t.rows[row].0,
                    &t.rows[row + 1].0,
                    &t.cols[0],
                    &t.cols[1],
                ),
                (
                    "right",
                    &t.rows[row].1,
                    &t.rows[row + 1].1,
                    &t.cols[1],
                    &t.cols[2],
                ),
            ] {
                let vl = if row == 0 { &v_left.1 } else { &v_left.0 };
                let vr = if row == 0 { &v_right.1 } else { &v_right.0 };
                let upper = compose(h_top.get(idx), vl.get(idx));
                let lower = compose(vr.get(idx), h_bot.get(idx));
                match (upper, lower) {
                    (Ok(u), Ok(l)) => match mor_equal(&u, &l) {
                        Ok(true) => {}
                        Ok(false) => r.push(
                            format!("square[{row},{which}].{idx}"),
                            "square does not commute",
                        ),
                        Err(e) => r.push(format!("square[{row},{which}].{idx}"), e.to_string()),
                    },
                    _ => r.push(
                        format!("square[{row},{which}].{idx}"),
                        "square maps do not compose",
                    ),
                }
            }
        }
    }
    r
}

/// An element of the free abelian group on type-`level` double sequences.
#[derive(Debug, Clone)]
pub struct FormalSum {
    level: u8,
    terms: Vec<(i64, DoubleSes)>,
}

impl FormalSum {
    pub fn new(level: u8, terms: Vec<(i64, DoubleSes)>) -> Result<FormalSum> {
        assert!(level <= 3, "type level ranges over 0..=3");
        for (_, d) in &terms {
            if dses_type(d) < level {
                return Err(Error::Precondition(format!(
                    "term of type {} in a level-{} formal sum",
                    dses_type(d),
                    level
                )));
            }
        }
        Ok(FormalSum { level, terms })
    }

    pub fn empty(level: u8) -> FormalSum {
        FormalSum {
            level,
            terms: Vec::new(),
        }
    }

    pub fn singleton(level: u8, d: DoubleSes) -> Result<FormalSum> {
        FormalSum::new(level, vec![(1, d)])
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn terms(&self) -> &[(i64, DoubleSes)] {
        &self.terms
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use num_bigint::BigInt;

    fn z() -> BaseRing {
        BaseRing::Integers
    }

    fn gf(p: u64) -> BaseRing {
        BaseRing::prime_field(p).unwrap()
    }

    fn split_ses(ring: BaseRing, r1: usize, r2: usize) -> (Morphism, Morphism) {
        let x = PresentedObject::free(ring, r1);
        let y = PresentedObject::free(ring, r2);
        let b = category::biproduct(&x, &y).unwrap();
        (b.i_l, b.p_r)
    }

    #[test]
    fn split_ses_is_valid() {
        let (f, g) = split_ses(z(), 1, 2);
        assert!(validate_ses(&f, &g).is_valid());
    }

    #[test]
    fn non_exact_pair_is_reported() {
        let free = PresentedObject::free(z(), 1);
        let two = Morphism::new(
            free.clone(),
            free.clone(),
            Matrix::from_i64(z(), 1, 1, &[2]),
        )
        .unwrap();
        let id = Morphism::identity(&free);
        let rep = validate_ses(&two, &id);
        assert!(!rep.is_valid(), "g o f nonzero must be reported");
    }

    #[test]
    fn quotient_ses_is_valid() {
        let free = PresentedObject::free(z(), 1);
        let c5 = PresentedObject::from_presentation(Matrix::from_i64(z(), 1, 1, &[5]));
        let by5 = Morphism::new(
            free.clone(),
            free.clone(),
            Matrix::from_i64(z(), 1, 1, &[5]),
        )
        .unwrap();
        let q = Morphism::new(free.clone(), c5, Matrix::from_i64(z(), 1, 1, &[1])).unwrap();
        assert!(validate_ses(&by5, &q).is_valid());
    }

    #[test]
    fn dses_type_examples() {
        let (f, g) = split_ses(z(), 1, 1);
        assert_eq!(dses_type(&DoubleSes::trivial(&f, &g)), 3);

        let free = PresentedObject::free(z(), 1);
        let c5 = PresentedObject::from_presentation(Matrix::from_i64(z(), 1, 1, &[5]));
        let by5 = Morphism::new(
            free.clone(),
            free.clone(),
            Matrix::from_i64(z(), 1, 1, &[5]),
        )
        .unwrap();
        let q = Morphism::new(free.clone(), c5, Matrix::from_i64(z(), 1, 1, &[1])).unwrap();
        let d = DoubleSes::trivial(&by5, &q);
        assert_eq!(dses_type(&d), 2, "torsion quotient stops at type 2");

        let (f5, g5) = split_ses(gf(5), 1, 1);
        assert_eq!(
            dses_type(&DoubleSes::trivial(&f5, &g5)),
            3,
            "over a field F is everything"
        );
    }

    #[test]
    fn lemma_pl_shape_is_valid() {
        for ring in [z(), gf(5)] {
            for rank in 0..3 {
                let a = PresentedObject::free(ring, rank);
                let d = lemma_pl_dses(&a);
                assert!(validate_dses(&d).is_valid(), "rank {rank}");
            }
        }
    }

    #[test]
    fn swap_is_an_involution() {
        let (f, g) = split_ses(z(), 2, 1);
        let d = DoubleSes::trivial(&f, &g);
        assert_eq!(d.swap().swap(), d);
        let pl = lemma_pl_dses(&PresentedObject::free(z(), 1));
        assert_eq!(pl.swap().swap(), pl);
        assert_eq!(
            DoubleSes::trivial(&f, &g).swap(),
            DoubleSes::trivial(&f, &g)
        );
    }

    #[test]
    fn direct_sum_is_valid() {
        let d = lemma_pl_dses(&PresentedObject::free(z(), 1));
        let (f, g) = split_ses(z(), 1, 2);
        let e = DoubleSes::trivial(&f, &g);
        let s = dses_direct_sum(&d, &e).unwrap();
        assert!(validate_dses(&s).is_valid());
        let (f5, g5) = split_ses(gf(5), 1, 1);
        assert!(dses_direct_sum(&d, &DoubleSes::trivial(&f5, &g5)).is_err());
    }

    #[test]
    fn perturbed_diagrams_are_reported() {
        // hand-broken mutations of a valid diagram must produce findings
        let cfg = crate::gen::GenConfig::new(z(), 23);
        let t = crate::gen::random_3x3(&cfg, 1, crate::gen::Strategy::C);
        assert!(validate_3x3(&t).is_valid());
        for (which, row, idx) in [("row-f", 0usize, 1usize), ("row-g", 1, 2)] {
            let mut bad = t.clone();
            let edge = if which == "row-f" {
                &mut bad.rows[row].0
            } else {
                &mut bad.rows[row].1
            };
            let m = if idx == 1 { &mut edge.m1 } else { &mut edge.m2 };
            let mut map = m.map().clone();
            let v = map.at(0, 0) + BigInt::from(1);
            map.set(0, 0, v);
            *m = Morphism::new_unchecked(m.src().clone(), m.dst().clone(), map).unwrap();
            let rep = validate_3x3(&bad);
            assert!(!rep.is_valid(), "{which} mutation must be caught");
        }
        // an object swap breaks endpoint matching
        let mut bad = t.clone();
        bad.objects[0][0] = PresentedObject::free(z(), bad.objects[0][0].generators() + 1);
        assert!(!validate_3x3(&bad).is_valid());
    }

    #[test]
    fn formal_sum_type_gate() {
        let free = PresentedObject::free(z(), 1);
        let c5 = PresentedObject::from_presentation(Matrix::from_i64(z(), 1, 1, &[5]));
        let by5 = Morphism::new(
            free.clone(),
            free.clone(),
            Matrix::from_i64(z(), 1, 1, &[5]),
        )
        .unwrap();
        let q = Morphism::new(free.clone(), c5, Matrix::from_i64(z(), 1, 1, &[1])).unwrap();
        let d = DoubleSes::trivial(&by5, &q); // type 2
        assert!(FormalSum::new(2, vec![(1, d.clone())]).is_ok());
        assert!(FormalSum::new(3, vec![(1, d.clone())]).is_err());
        assert_eq!(FormalSum::empty(3).terms().len(), 0);
        // viewing a sum one level down keeps the terms verbatim
        let s2 = FormalSum::new(2, vec![(3, d.clone()), (-1, d.clone())]).unwrap();
        let s1 = crate::resolution::include_sum(&s2).unwrap();
        assert_eq!(s1.level(), 1);
        assert_eq!(s1.terms().len(), 2);
        assert_eq!(s1.terms()[0].0, 3);
        assert_eq!(&s1.terms()[1].1, &d);
    }
}

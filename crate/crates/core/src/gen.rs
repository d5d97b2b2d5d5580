//! Deterministic randomized generation of objects, double sequences and 3x3
//! diagrams, seeded and reproducible. Generators never reject: every value is
//! correct by construction (split models conjugated by index-wise twists),
//! so validity does not depend on sampling luck.

use num_bigint::BigInt;

use crate::category::{biproduct, compose, kernel, mor_inverse, Morphism, PresentedObject};
use crate::diagrams::{DoubleSes, Edge, ThreeByThree};
use crate::linalg::{BaseRing, Matrix};
use crate::resolution;

/// The fixed 64-bit shift generator all randomness flows from.
///
/// Update function (xorshift64*), applied to a nonzero state `s`:
/// `s ^= s >> 12; s ^= s << 25; s ^= s >> 27; output = s * 0x2545F4914F6CDD1D`.
/// Streams are derived as `state = seed XOR (counter+1) * 0x9E3779B97F4A7C15`,
/// replaced by that multiplier when zero, then warmed up by three updates.
#[derive(Debug, Clone)]
pub struct Rng64 {
    state: u64,
}

impl Rng64 {
    pub fn new(seed: u64) -> Rng64 {
        Rng64::stream(seed, 0)
    }

    pub fn stream(seed: u64, counter: u64) -> Rng64 {
        let mixed = seed ^ (counter.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut rng = Rng64 {
            state: if mixed == 0 {
                0x9E37_79B9_7F4A_7C15
            } else {
                mixed
            },
        };
        for _ in 0..3 {
            rng.next_u64();
        }
        rng
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut s = self.state;
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        self.state = s;
        s.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform-enough draw below `n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    /// Inclusive range draw.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as usize) as i64
    }

    pub fn sign(&mut self) -> i64 {
        if self.below(2) == 0 {
            1
        } else {
            -1
        }
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len())]
    }
}

/// Shared knobs for every generator.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub ring: BaseRing,
    pub seed: u64,
    pub max_rank: usize,
    pub entry_bound: i64,
    pub torsion_palette: Vec<u64>,
}

impl GenConfig {
    pub fn new(ring: BaseRing, seed: u64) -> GenConfig {
        GenConfig {
            ring,
            seed,
            max_rank: 4,
            entry_bound: 3,
            torsion_palette: vec![2, 3, 4, 5],
        }
    }

    fn rng(&self, counter: u64) -> Rng64 {
        Rng64::stream(self.seed, counter)
    }
}

/// Invertible matrix as a product of `2n` elementary row operations with
/// multipliers bounded by `bound` (determinant +-1 over Z, a unit over GF(p)).
pub(crate) fn unimodular_with_rng(ring: BaseRing, n: usize, bound: i64, rng: &mut Rng64) -> Matrix {
    let mut m = Matrix::identity(ring, n);
    if n == 0 {
        return m;
    }
    for _ in 0..2 * n {
        match rng.below(6) {
            0 => {
                let i = rng.below(n);
                let j = rng.below(n);
                if i != j {
                    let mut swapped = Matrix::identity(ring, n);
                    swapped.set(i, i, BigInt::from(0));
                    swapped.set(j, j, BigInt::from(0));
                    swapped.set(i, j, BigInt::from(1));
                    swapped.set(j, i, BigInt::from(1));
                    m = swapped.mul(&m);
                }
            }
            1 => {
                let i = rng.below(n);
                let mut neg = Matrix::identity(ring, n);
                let c = match ring {
                    BaseRing::Integers => BigInt::from(-1),
                    BaseRing::PrimeField(p) => BigInt::from(rng.range_i64(1, p as i64 - 1)),
                };
                neg.set(i, i, c);
                m = neg.mul(&m);
            }
            _ => {
                let i = rng.below(n);
                let j = rng.below(n);
                if i != j {
                    let mut add = Matrix::identity(ring, n);
                    let mut c = rng.range_i64(-bound, bound);
                    if c == 0 {
                        c = 1;
                    }
                    add.set(i, j, BigInt::from(c));
                    m = add.mul(&m);
                }
            }
        }
    }
    m
}

/// Seeded invertible matrix; stream `counter` decouples concurrent draws.
pub fn random_unimodular(cfg: &GenConfig, counter: u64, n: usize) -> Matrix {
    let mut rng = cfg.rng(counter);
    unimodular_with_rng(cfg.ring, n, cfg.entry_bound, &mut rng)
}

fn free_dses_with_rng(cfg: &GenConfig, rng: &mut Rng64, r1: usize, r2: usize) -> DoubleSes {
    let ring = cfg.ring;
    let n = r1 + r2;
    let a_prime = PresentedObject::free(ring, r1);
    let a = PresentedObject::free(ring, n);
    let a_dprime = PresentedObject::free(ring, r2);
    let u = unimodular_with_rng(ring, n, cfg.entry_bound, rng);
    let u_inv = crate::linalg::solve_matrix(&u, &Matrix::identity(ring, n)).expect("unimodular");
    // split structure twisted by u: f = u . i_l, g = p_r . u^-1
    let f1 = Morphism::new(a_prime.clone(), a.clone(), u.col_slice(0, r1)).unwrap();
    let g1 = Morphism::new(a.clone(), a_dprime.clone(), u_inv.row_slice(r1, n)).unwrap();
    // second structure by automorphism twists on all three objects
    let w_p = unimodular_with_rng(ring, r1, cfg.entry_bound, rng);
    let w_a = unimodular_with_rng(ring, n, cfg.entry_bound, rng);
    let w_a_inv =
        crate::linalg::solve_matrix(&w_a, &Matrix::identity(ring, n)).expect("unimodular");
    let w_q = unimodular_with_rng(ring, r2, cfg.entry_bound, rng);
    let f2 = Morphism::new(a_prime.clone(), a.clone(), w_a.mul(f1.map()).mul(&w_p)).unwrap();
    let g2 = Morphism::new(a.clone(), a_dprime.clone(), w_q.mul(g1.map()).mul(&w_a_inv)).unwrap();
    DoubleSes::new(a_prime, a, a_dprime, f1, f2, g1, g2)
}

/// A valid double sequence on free objects: a split sequence twisted by a
/// random change of basis, with the second structure conjugated by random
/// automorphisms.
pub fn random_free_dses(cfg: &GenConfig, counter: u64, r1: usize, r2: usize) -> DoubleSes {
    let mut rng = cfg.rng(counter);
    free_dses_with_rng(cfg, &mut rng, r1, r2)
}

fn general_dses_with_rng(cfg: &GenConfig, rng: &mut Rng64) -> DoubleSes {
    assert_eq!(
        cfg.ring,
        BaseRing::Integers,
        "general generation targets the integers"
    );
    let ring = cfg.ring;
    let n = 1 + rng.below(cfg.max_rank);
    let rel_cols = rng.below(3);
    let mut rel = Matrix::zero(ring, n, rel_cols);
    for j in 0..rel_cols {
        if rng.below(2) == 0 {
            let t = *rng.pick(&cfg.torsion_palette);
            rel.set(rng.below(n), j, BigInt::from(t as i64));
        } else {
            for i in 0..n {
                rel.set(
                    i,
                    j,
                    BigInt::from(rng.range_i64(-cfg.entry_bound, cfg.entry_bound)),
                );
            }
        }
    }
    let extra_cols = 1 + rng.below(2);
    let mut extra = Matrix::zero(ring, n, extra_cols);
    for j in 0..extra_cols {
        if rng.below(2) == 0 {
            let t = *rng.pick(&cfg.torsion_palette);
            extra.set(rng.below(n), j, BigInt::from(t as i64));
        } else {
            for i in 0..n {
                extra.set(
                    i,
                    j,
                    BigInt::from(rng.range_i64(-cfg.entry_bound, cfg.entry_bound)),
                );
            }
        }
    }
    let a = PresentedObject::new(ring, n, rel.clone());
    let a_dprime = PresentedObject::new(ring, n, rel.hstack(&extra));
    let g1 = Morphism::new(a.clone(), a_dprime.clone(), Matrix::identity(ring, n)).unwrap();
    let (a_prime, f1) = kernel(&g1);
    let f2 = f1.scale(&BigInt::from(rng.sign()));
    let g2 = g1.scale(&BigInt::from(rng.sign()));
    DoubleSes::new(a_prime, a, a_dprime, f1, f2, g1, g2)
}

/// A valid double sequence over the integers with possibly torsion objects:
/// a quotient by appended relation columns, its kernel, and sign twists on
/// the second structure.
pub fn random_general_dses(cfg: &GenConfig, counter: u64) -> DoubleSes {
    let mut rng = cfg.rng(counter);
    general_dses_with_rng(cfg, &mut rng)
}

/// A type-0 double sequence over the integers whose kernel object carries
/// torsion (the inputs the resolution chain exists for).
pub fn random_torsion_type0_dses(cfg: &GenConfig, counter: u64) -> DoubleSes {
    assert_eq!(cfg.ring, BaseRing::Integers);
    let mut rng = cfg.rng(counter);
    let ring = cfg.ring;
    let blocks = 1 + rng.below(2);
    let mut rel = Matrix::zero(ring, blocks, blocks);
    let mut extra = Matrix::zero(ring, blocks, blocks);
    for i in 0..blocks {
        let t = *rng.pick(&cfg.torsion_palette) as i64;
        rel.set(i, i, BigInt::from(t * t));
        extra.set(i, i, BigInt::from(t));
    }
    let a = PresentedObject::new(ring, blocks, rel.clone());
    let a_dprime = PresentedObject::new(ring, blocks, rel.hstack(&extra));
    let g1 = Morphism::new(a.clone(), a_dprime.clone(), Matrix::identity(ring, blocks)).unwrap();
    let (a_prime, f1) = kernel(&g1);
    let f2 = f1.scale(&BigInt::from(rng.sign()));
    let g2 = g1.scale(&BigInt::from(rng.sign()));
    let d = DoubleSes::new(a_prime, a, a_dprime, f1, f2, g1, g2);
    debug_assert_eq!(crate::diagrams::dses_type(&d), 0);
    d
}

/// An index-twist: a pair of automorphisms with their inverses. Free objects
/// draw invertible matrices; presented objects fall back to sign flips,
/// which are automorphisms of everything.
struct Twist {
    w: [Morphism; 2],
    w_inv: [Morphism; 2],
}

impl Twist {
    fn identity(o: &PresentedObject) -> Twist {
        let id = Morphism::identity(o);
        Twist {
            w: [id.clone(), id.clone()],
            w_inv: [id.clone(), id],
        }
    }

    fn single(o: &PresentedObject, cfg: &GenConfig, rng: &mut Rng64) -> Twist {
        let m = random_auto(o, cfg, rng);
        let inv = mor_inverse(&m).expect("generated automorphism");
        Twist {
            w: [m.clone(), m],
            w_inv: [inv.clone(), inv],
        }
    }

    fn doubled(o: &PresentedObject, cfg: &GenConfig, rng: &mut Rng64) -> Twist {
        let m1 = random_auto(o, cfg, rng);
        let m2 = random_auto(o, cfg, rng);
        let i1 = mor_inverse(&m1).expect("generated automorphism");
        let i2 = mor_inverse(&m2).expect("generated automorphism");
        Twist {
            w: [m1, m2],
            w_inv: [i1, i2],
        }
    }
}

fn random_auto(o: &PresentedObject, cfg: &GenConfig, rng: &mut Rng64) -> Morphism {
    if o.relations().cols() == 0 {
        let m = unimodular_with_rng(o.ring(), o.generators(), cfg.entry_bound, rng);
        Morphism::new(o.clone(), o.clone(), m).unwrap()
    } else {
        let s = BigInt::from(rng.sign());
        Morphism::identity(o).scale(&s)
    }
}

/// Conjugate a base edge by the twists of its endpoints, index-wise.
fn twist_edge(base: &Morphism, from: &Twist, to: &Twist) -> Edge {
    let m1 = compose(&to.w[0], &compose(base, &from.w_inv[0]).unwrap()).unwrap();
    let m2 = compose(&to.w[1], &compose(base, &from.w_inv[1]).unwrap()).unwrap();
    Edge::new(m1, m2)
}

fn twist_edge_single(base: &Morphism, from: &Twist, to: &Twist) -> Edge {
    Edge::single(compose(&to.w[0], &compose(base, &from.w_inv[0]).unwrap()).unwrap())
}

/// Which isomorphism columns of the two-parallel-rows schema are twisted.
pub(crate) struct VerticalIsoSpec {
    pub left: bool,
    pub middle: bool,
    pub right: bool,
}

/// The two-parallel-rows schema: the given sequence as the middle row, a
/// conjugated copy on top, a zero bottom row, columns of isomorphisms.
pub(crate) fn vertical_iso_input(
    d: &DoubleSes,
    spec: &VerticalIsoSpec,
    cfg: &GenConfig,
    rng: &mut Rng64,
) -> ThreeByThree {
    let mut mk = |on: bool, o: &PresentedObject| {
        if on {
            Twist::doubled(o, cfg, rng)
        } else {
            Twist::identity(o)
        }
    };
    let t_l = mk(spec.left, &d.a_prime);
    let t_m = mk(spec.middle, &d.a);
    let t_r = mk(spec.right, &d.a_dprime);
    let zero = PresentedObject::zero(d.ring());
    let f_edge = Edge::new(
        compose(&t_m.w[0], &compose(&d.f1, &t_l.w_inv[0]).unwrap()).unwrap(),
        compose(&t_m.w[1], &compose(&d.f2, &t_l.w_inv[1]).unwrap()).unwrap(),
    );
    let g_edge = Edge::new(
        compose(&t_r.w[0], &compose(&d.g1, &t_m.w_inv[0]).unwrap()).unwrap(),
        compose(&t_r.w[1], &compose(&d.g2, &t_m.w_inv[1]).unwrap()).unwrap(),
    );
    ThreeByThree {
        objects: [
            [d.a_prime.clone(), d.a.clone(), d.a_dprime.clone()],
            [d.a_prime.clone(), d.a.clone(), d.a_dprime.clone()],
            [zero.clone(), zero.clone(), zero.clone()],
        ],
        rows: [
            (f_edge, g_edge),
            (
                Edge::new(d.f1.clone(), d.f2.clone()),
                Edge::new(d.g1.clone(), d.g2.clone()),
            ),
            (
                Edge::single(Morphism::zero(&zero, &zero)),
                Edge::single(Morphism::zero(&zero, &zero)),
            ),
        ],
        cols: [
            (
                Edge::single(Morphism::zero(&zero, &d.a_prime)),
                Edge::new(t_l.w[0].clone(), t_l.w[1].clone()),
            ),
            (
                Edge::single(Morphism::zero(&zero, &d.a)),
                Edge::new(t_m.w[0].clone(), t_m.w[1].clone()),
            ),
            (
                Edge::single(Morphism::zero(&zero, &d.a_dprime)),
                Edge::new(t_r.w[0].clone(), t_r.w[1].clone()),
            ),
        ],
    }
}

/// Cores for the three-object split models; torsion cores only over Z.
fn random_core(cfg: &GenConfig, rng: &mut Rng64, allow_torsion: bool) -> PresentedObject {
    let n = 1 + rng.below(cfg.max_rank.min(2));
    if allow_torsion && cfg.ring == BaseRing::Integers && rng.below(3) == 0 {
        let mut rel = Matrix::zero(cfg.ring, n, 1);
        let t = *rng.pick(&cfg.torsion_palette);
        rel.set(rng.below(n), 0, BigInt::from(t as i64));
        PresentedObject::new(cfg.ring, n, rel)
    } else {
        PresentedObject::free(cfg.ring, n)
    }
}

struct SplitModel {
    u: PresentedObject,
    v: PresentedObject,
    w: PresentedObject,
    b: PresentedObject,
    c: PresentedObject,
    b_dp: PresentedObject,
    incl_u_b: Morphism,
    proj_b_vw: Morphism,
    incl_u_c: Morphism,
    proj_c_v: Morphism,
    incl_c_b: Morphism,
    proj_b_w: Morphism,
    incl_v_bdp: Morphism,
    proj_bdp_w: Morphism,
}

/// The untwisted three-core model `b = u + v + w` with `c = u + v`,
/// `b'' = v + w`, and all canonical inclusions and projections.
fn split_model(cfg: &GenConfig, rng: &mut Rng64, allow_torsion: bool) -> SplitModel {
    let ring = cfg.ring;
    let u = random_core(cfg, rng, allow_torsion);
    let v = random_core(cfg, rng, allow_torsion);
    let w = random_core(cfg, rng, allow_torsion);
    let (nu, nv, nw) = (u.generators(), v.generators(), w.generators());
    let c = biproduct(&u, &v).unwrap().sum;
    let b = biproduct(&c, &w).unwrap().sum;
    let b_dp = biproduct(&v, &w).unwrap().sum;
    let zero = |r: usize, c: usize| Matrix::zero(ring, r, c);
    let eye = |n: usize| Matrix::identity(ring, n);
    let incl_u_b = Morphism::new(u.clone(), b.clone(), eye(nu).vstack(&zero(nv + nw, nu))).unwrap();
    let proj_b_vw = Morphism::new(
        b.clone(),
        b_dp.clone(),
        zero(nv + nw, nu).hstack(&eye(nv + nw)),
    )
    .unwrap();
    let incl_u_c = Morphism::new(u.clone(), c.clone(), eye(nu).vstack(&zero(nv, nu))).unwrap();
    let proj_c_v = Morphism::new(c.clone(), v.clone(), zero(nv, nu).hstack(&eye(nv))).unwrap();
    let incl_c_b = Morphism::new(
        c.clone(),
        b.clone(),
        eye(nu + nv).vstack(&zero(nw, nu + nv)),
    )
    .unwrap();
    let proj_b_w = Morphism::new(b.clone(), w.clone(), zero(nw, nu + nv).hstack(&eye(nw))).unwrap();
    let incl_v_bdp = Morphism::new(v.clone(), b_dp.clone(), eye(nv).vstack(&zero(nw, nv))).unwrap();
    let proj_bdp_w = Morphism::new(b_dp.clone(), w.clone(), zero(nw, nv).hstack(&eye(nw))).unwrap();
    SplitModel {
        u,
        v,
        w,
        b,
        c,
        b_dp,
        incl_u_b,
        proj_b_vw,
        incl_u_c,
        proj_c_v,
        incl_c_b,
        proj_b_w,
        incl_v_bdp,
        proj_bdp_w,
    }
}

/// Equal-top-row input (rows `b' -> b -> b''` and `b' -> c -> c''` under a
/// repeated `a`), fully twisted when `twist` is set.
pub(crate) fn equal_top_input(
    cfg: &GenConfig,
    rng: &mut Rng64,
    twist: bool,
    allow_torsion: bool,
) -> ThreeByThree {
    let m = split_model(cfg, rng, allow_torsion);
    let zero = PresentedObject::zero(cfg.ring);
    let mk = |o: &PresentedObject, rng: &mut Rng64| {
        if twist {
            Twist::doubled(o, cfg, rng)
        } else {
            Twist::identity(o)
        }
    };
    let mk_single = |o: &PresentedObject, rng: &mut Rng64| {
        if twist {
            Twist::single(o, cfg, rng)
        } else {
            Twist::identity(o)
        }
    };
    // a-positions share one single twist; all b/c positions twist per index
    let t_a = mk_single(&m.w, rng);
    let t_21 = mk(&m.u, rng);
    let t_31 = mk(&m.u, rng);
    let t_b = mk(&m.b, rng);
    let t_bdp = mk(&m.b_dp, rng);
    let t_c = mk(&m.c, rng);
    let t_v = mk(&m.v, rng);
    ThreeByThree {
        objects: [
            [zero.clone(), m.w.clone(), m.w.clone()],
            [m.u.clone(), m.b.clone(), m.b_dp.clone()],
            [m.u.clone(), m.c.clone(), m.v.clone()],
        ],
        rows: [
            (
                Edge::single(Morphism::zero(&zero, &m.w)),
                twist_edge_single(&Morphism::identity(&m.w), &t_a, &t_a),
            ),
            (
                twist_edge(&m.incl_u_b, &t_21, &t_b),
                twist_edge(&m.proj_b_vw, &t_b, &t_bdp),
            ),
            (
                twist_edge(&m.incl_u_c, &t_31, &t_c),
                twist_edge(&m.proj_c_v, &t_c, &t_v),
            ),
        ],
        cols: [
            (
                twist_edge(&Morphism::identity(&m.u), &t_31, &t_21),
                Edge::single(Morphism::zero(&m.u, &zero)),
            ),
            (
                twist_edge(&m.incl_c_b, &t_c, &t_b),
                twist_edge(&m.proj_b_w, &t_b, &t_a),
            ),
            (
                twist_edge(&m.incl_v_bdp, &t_v, &t_bdp),
                twist_edge(&m.proj_bdp_w, &t_bdp, &t_a),
            ),
        ],
    }
}

/// Equal-bottom-row input (single top row `(a', a, a'')`, doubled middle row,
/// repeated `c` at the bottom).
pub(crate) fn equal_bottom_input(
    cfg: &GenConfig,
    rng: &mut Rng64,
    twist: bool,
    allow_torsion: bool,
) -> ThreeByThree {
    // cores: x = c, y = a', z = a''; b = x + y + z reshuffled via the model:
    // reuse split_model with u = y (a'), and read rows/columns accordingly
    let ring = cfg.ring;
    let y = random_core(cfg, rng, allow_torsion); // a'
    let x = random_core(cfg, rng, allow_torsion); // c
    let z = random_core(cfg, rng, allow_torsion); // a''
    let (ny, nx, nz) = (y.generators(), x.generators(), z.generators());
    let a = biproduct(&y, &z).unwrap().sum;
    let b = biproduct(&x, &a).unwrap().sum; // x + y + z
    let b_dp = biproduct(&x, &z).unwrap().sum;
    let zero_m = |r: usize, c: usize| Matrix::zero(ring, r, c);
    let eye = |n: usize| Matrix::identity(ring, n);
    let zero = PresentedObject::zero(ring);

    let f_a = Morphism::new(y.clone(), a.clone(), eye(ny).vstack(&zero_m(nz, ny))).unwrap();
    let g_a = Morphism::new(a.clone(), z.clone(), zero_m(nz, ny).hstack(&eye(nz))).unwrap();
    let f_b = Morphism::new(
        y.clone(),
        b.clone(),
        zero_m(nx, ny).vstack(&eye(ny)).vstack(&zero_m(nz, ny)),
    )
    .unwrap();
    let g_b = Morphism::new(
        b.clone(),
        b_dp.clone(),
        eye(nx)
            .hstack(&zero_m(nx, ny + nz))
            .vstack(&zero_m(nz, nx + ny).hstack(&eye(nz))),
    )
    .unwrap();
    let alpha = Morphism::new(x.clone(), b.clone(), eye(nx).vstack(&zero_m(ny + nz, nx))).unwrap();
    let beta = Morphism::new(
        b.clone(),
        a.clone(),
        zero_m(ny + nz, nx).hstack(&eye(ny + nz)),
    )
    .unwrap();
    let alpha_dp = Morphism::new(x.clone(), b_dp.clone(), eye(nx).vstack(&zero_m(nz, nx))).unwrap();
    let beta_dp = Morphism::new(b_dp.clone(), z.clone(), zero_m(nz, nx).hstack(&eye(nz))).unwrap();

    let mk = |o: &PresentedObject, rng: &mut Rng64| {
        if twist {
            Twist::doubled(o, cfg, rng)
        } else {
            Twist::identity(o)
        }
    };
    let mk_single = |o: &PresentedObject, rng: &mut Rng64| {
        if twist {
            Twist::single(o, cfg, rng)
        } else {
            Twist::identity(o)
        }
    };
    // top row is single: its three positions twist index-independently
    let t_ap = mk_single(&y, rng);
    let t_a = mk_single(&a, rng);
    let t_adp = mk_single(&z, rng);
    let t_10 = mk(&y, rng); // middle-row a' position
    let t_b = mk(&b, rng);
    let t_bdp = mk(&b_dp, rng);
    let t_c = mk(&x, rng); // both bottom positions share this twist

    ThreeByThree {
        objects: [
            [y.clone(), a.clone(), z.clone()],
            [y.clone(), b.clone(), b_dp.clone()],
            [zero.clone(), x.clone(), x.clone()],
        ],
        rows: [
            (
                twist_edge_single(&f_a, &t_ap, &t_a),
                twist_edge_single(&g_a, &t_a, &t_adp),
            ),
            (
                twist_edge(&f_b, &t_10, &t_b),
                twist_edge(&g_b, &t_b, &t_bdp),
            ),
            (
                Edge::single(Morphism::zero(&zero, &x)),
                twist_edge(&Morphism::identity(&x), &t_c, &t_c),
            ),
        ],
        cols: [
            (
                Edge::single(Morphism::zero(&zero, &y)),
                twist_edge(&Morphism::identity(&y), &t_10, &t_ap),
            ),
            (
                twist_edge(&alpha, &t_c, &t_b),
                twist_edge(&beta, &t_b, &t_a),
            ),
            (
                twist_edge(&alpha_dp, &t_c, &t_bdp),
                twist_edge(&beta_dp, &t_bdp, &t_adp),
            ),
        ],
    }
}

/// Equal-top-row input with an equality left column and a single right
/// column (the type-2 flavor).
pub(crate) fn equal_top_single_right_input(
    cfg: &GenConfig,
    rng: &mut Rng64,
    twist: bool,
) -> ThreeByThree {
    let m = split_model(cfg, rng, false);
    let zero = PresentedObject::zero(cfg.ring);
    let mk = |o: &PresentedObject, rng: &mut Rng64| {
        if twist {
            Twist::doubled(o, cfg, rng)
        } else {
            Twist::identity(o)
        }
    };
    let mk_single = |o: &PresentedObject, rng: &mut Rng64| {
        if twist {
            Twist::single(o, cfg, rng)
        } else {
            Twist::identity(o)
        }
    };
    let t_a = mk_single(&m.w, rng);
    let t_cp = mk(&m.u, rng); // both c' positions share it (keeps the left column an equality)
    let t_b = mk(&m.b, rng);
    let t_c = mk(&m.c, rng);
    let t_bdp = mk_single(&m.b_dp, rng); // single: the right column stays single
    let t_cdp = mk_single(&m.v, rng);
    ThreeByThree {
        objects: [
            [zero.clone(), m.w.clone(), m.w.clone()],
            [m.u.clone(), m.b.clone(), m.b_dp.clone()],
            [m.u.clone(), m.c.clone(), m.v.clone()],
        ],
        rows: [
            (
                Edge::single(Morphism::zero(&zero, &m.w)),
                twist_edge_single(&Morphism::identity(&m.w), &t_a, &t_a),
            ),
            (
                twist_edge(&m.incl_u_b, &t_cp, &t_b),
                twist_edge(&m.proj_b_vw, &t_b, &t_bdp),
            ),
            (
                twist_edge(&m.incl_u_c, &t_cp, &t_c),
                twist_edge(&m.proj_c_v, &t_c, &t_cdp),
            ),
        ],
        cols: [
            (
                twist_edge(&Morphism::identity(&m.u), &t_cp, &t_cp),
                Edge::single(Morphism::zero(&m.u, &zero)),
            ),
            (
                twist_edge(&m.incl_c_b, &t_c, &t_b),
                twist_edge(&m.proj_b_w, &t_b, &t_a),
            ),
            (
                twist_edge_single(&m.incl_v_bdp, &t_cdp, &t_bdp),
                twist_edge_single(&m.proj_bdp_w, &t_bdp, &t_a),
            ),
        ],
    }
}

/// The specific 3x3 whose middle column is the `(i_r, i_l; -p_l, p_r)`
/// sequence on `a + a` (the vanishing-middle-column schema).
pub(crate) fn lemma_pl_schema(a: &PresentedObject) -> ThreeByThree {
    let ring = a.ring();
    let zero = PresentedObject::zero(ring);
    let b = biproduct(a, a).unwrap();
    let diff = Morphism::new(
        a.clone(),
        b.sum.clone(),
        Matrix::identity(ring, a.generators())
            .neg()
            .vstack(&Matrix::identity(ring, a.generators())),
    )
    .unwrap();
    let fold = Morphism::new(
        b.sum.clone(),
        a.clone(),
        Matrix::identity(ring, a.generators()).hstack(&Matrix::identity(ring, a.generators())),
    )
    .unwrap();
    ThreeByThree {
        objects: [
            [a.clone(), a.clone(), zero.clone()],
            [a.clone(), b.sum.clone(), a.clone()],
            [zero.clone(), a.clone(), a.clone()],
        ],
        rows: [
            (
                Edge::single(Morphism::identity(a)),
                Edge::single(Morphism::zero(a, &zero)),
            ),
            (Edge::single(diff), Edge::single(fold)),
            (
                Edge::single(Morphism::zero(&zero, a)),
                Edge::single(Morphism::identity(a)),
            ),
        ],
        cols: [
            (
                Edge::single(Morphism::zero(&zero, a)),
                Edge::single(Morphism::identity(a)),
            ),
            (
                Edge::new(b.i_r.clone(), b.i_l.clone()),
                Edge::new(b.p_l.neg(), b.p_r.clone()),
            ),
            (
                Edge::single(Morphism::identity(a)),
                Edge::single(Morphism::zero(a, &zero)),
            ),
        ],
    }
}

/// The four public generation strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Two parallel rows joined by isomorphism columns over a zero bottom row.
    A,
    /// Equal top row over a shared left object.
    B,
    /// The swap-sum schema around a random double sequence.
    C,
    /// The witness of one phi application.
    D,
}

/// A valid 3x3 diagram per strategy; over the integers, strategies draw a
/// mix of free and torsion-bearing instances.
pub fn random_3x3(cfg: &GenConfig, counter: u64, strategy: Strategy) -> ThreeByThree {
    let mut rng = cfg.rng(counter);
    match strategy {
        Strategy::A => {
            let d = base_dses(cfg, &mut rng);
            vertical_iso_input(
                &d,
                &VerticalIsoSpec {
                    left: true,
                    middle: true,
                    right: true,
                },
                cfg,
                &mut rng,
            )
        }
        Strategy::B => equal_top_input(cfg, &mut rng, true, true),
        Strategy::C => {
            let d = base_dses(cfg, &mut rng);
            resolution::swap_sum_schema(&d).expect("schema over one ring")
        }
        Strategy::D => {
            let d = base_dses(cfg, &mut rng);
            resolution::phi_auto(&d)
                .expect("phi of a valid sequence")
                .witness3x3
        }
    }
}

fn base_dses(cfg: &GenConfig, rng: &mut Rng64) -> DoubleSes {
    if cfg.ring == BaseRing::Integers && rng.below(4) == 0 {
        general_dses_with_rng(cfg, rng)
    } else {
        let r1 = 1 + rng.below(cfg.max_rank.min(2));
        let r2 = 1 + rng.below(cfg.max_rank.min(2));
        free_dses_with_rng(cfg, rng, r1, r2)
    }
}

/// A valid morphism between cores for the shear parameter of doubled
/// columns: arbitrary for a free source, zero otherwise.
fn random_shear(
    src: &PresentedObject,
    dst: &PresentedObject,
    cfg: &GenConfig,
    rng: &mut Rng64,
) -> Morphism {
    if src.relations().cols() == 0 {
        let mut m = Matrix::zero(cfg.ring, dst.generators(), src.generators());
        for i in 0..dst.generators() {
            for j in 0..src.generators() {
                m.set(
                    i,
                    j,
                    BigInt::from(rng.range_i64(-cfg.entry_bound, cfg.entry_bound)),
                );
            }
        }
        // a matrix into a presented object is a morphism from a free source
        Morphism::new(src.clone(), dst.clone(), m).unwrap()
    } else {
        Morphism::zero(src, dst)
    }
}

/// Equal-top-row schema with *single* rows and doubled columns, the exact
/// shape of the level-0 column-sum relation: columns are two independent
/// complement choices (automorphism and shear parameters per index).
pub(crate) fn equal_top_relation_input(
    cfg: &GenConfig,
    rng: &mut Rng64,
    allow_torsion: bool,
) -> ThreeByThree {
    let m = split_model(cfg, rng, allow_torsion);
    let ring = cfg.ring;
    let zero = PresentedObject::zero(ring);
    let (nu, nv, nw) = (m.u.generators(), m.v.generators(), m.w.generators());
    let zero_m = |r: usize, c: usize| Matrix::zero(ring, r, c);

    // per-index parameters
    let mut alpha_prime = Vec::new();
    let mut alpha = Vec::new();
    let mut alpha_dp = Vec::new();
    let mut beta = Vec::new();
    let mut beta_dp = Vec::new();
    for _ in 0..2 {
        let ap = random_auto(&m.u, cfg, rng);
        let rho = random_auto(&m.v, cfg, rng);
        let cw = random_auto(&m.w, cfg, rng);
        let cw_inv = mor_inverse(&cw).unwrap();
        let t = random_shear(&m.v, &m.w, cfg, rng);
        // beta'' : v + w -> w, (v, w) |-> C w + T v
        let bdp = Morphism::new(m.b_dp.clone(), m.w.clone(), t.map().hstack(cw.map())).unwrap();
        // beta = beta'' . proj_{vw} kills u
        let b = Morphism::new(m.b.clone(), m.w.clone(), zero_m(nw, nu).hstack(bdp.map())).unwrap();
        // alpha'' : v -> v + w, v |-> (rho v, -C^-1 T rho v)
        let low = cw_inv.map().mul(t.map()).mul(rho.map()).neg();
        let adp = Morphism::new(m.v.clone(), m.b_dp.clone(), rho.map().vstack(&low)).unwrap();
        // alpha : u + v -> b, block (alpha' u; rho v; -C^-1 T rho v)
        let a_map = ap
            .map()
            .hstack(&zero_m(nu, nv))
            .vstack(&zero_m(nv, nu).hstack(rho.map()))
            .vstack(&zero_m(nw, nu).hstack(&low));
        let a = Morphism::new(m.c.clone(), m.b.clone(), a_map).unwrap();
        alpha_prime.push(ap);
        alpha.push(a);
        alpha_dp.push(adp);
        beta.push(b);
        beta_dp.push(bdp);
    }
    ThreeByThree {
        objects: [
            [zero.clone(), m.w.clone(), m.w.clone()],
            [m.u.clone(), m.b.clone(), m.b_dp.clone()],
            [m.u.clone(), m.c.clone(), m.v.clone()],
        ],
        rows: [
            (
                Edge::single(Morphism::zero(&zero, &m.w)),
                Edge::single(Morphism::identity(&m.w)),
            ),
            (
                Edge::single(m.incl_u_b.clone()),
                Edge::single(m.proj_b_vw.clone()),
            ),
            (
                Edge::single(m.incl_u_c.clone()),
                Edge::single(m.proj_c_v.clone()),
            ),
        ],
        cols: [
            (
                Edge::new(alpha_prime[0].clone(), alpha_prime[1].clone()),
                Edge::single(Morphism::zero(&m.u, &zero)),
            ),
            (
                Edge::new(alpha[0].clone(), alpha[1].clone()),
                Edge::new(beta[0].clone(), beta[1].clone()),
            ),
            (
                Edge::new(alpha_dp[0].clone(), alpha_dp[1].clone()),
                Edge::new(beta_dp[0].clone(), beta_dp[1].clone()),
            ),
        ],
    }
}

/// Equal-bottom-row schema with *single* rows and doubled columns, the exact
/// shape of the level-1 column-sum relation.
pub(crate) fn equal_bottom_relation_input(
    cfg: &GenConfig,
    rng: &mut Rng64,
    torsion_quotient: bool,
) -> ThreeByThree {
    let ring = cfg.ring;
    let mut mk_free = |lo: usize| PresentedObject::free(ring, lo + rng.below(2));
    let x = mk_free(1); // c
    let y = mk_free(1); // a'
    let z = if torsion_quotient && ring == BaseRing::Integers && rng.below(2) == 0 {
        let n = 1 + rng.below(2);
        let mut rel = Matrix::zero(ring, n, 1);
        let t = *rng.pick(&cfg.torsion_palette);
        rel.set(rng.below(n), 0, BigInt::from(t as i64));
        PresentedObject::new(ring, n, rel)
    } else {
        PresentedObject::free(ring, 1 + rng.below(2))
    };
    let (nx, ny, nz) = (x.generators(), y.generators(), z.generators());
    let a = biproduct(&y, &z).unwrap().sum;
    let b = biproduct(&x, &a).unwrap().sum;
    let b_dp = biproduct(&x, &z).unwrap().sum;
    let zero_m = |r: usize, c: usize| Matrix::zero(ring, r, c);
    let eye = |n: usize| Matrix::identity(ring, n);
    let zero = PresentedObject::zero(ring);

    let f_a = Morphism::new(y.clone(), a.clone(), eye(ny).vstack(&zero_m(nz, ny))).unwrap();
    let g_a = Morphism::new(a.clone(), z.clone(), zero_m(nz, ny).hstack(&eye(nz))).unwrap();
    let f_b = Morphism::new(
        y.clone(),
        b.clone(),
        zero_m(nx, ny).vstack(&eye(ny)).vstack(&zero_m(nz, ny)),
    )
    .unwrap();
    let g_b = Morphism::new(
        b.clone(),
        b_dp.clone(),
        eye(nx)
            .hstack(&zero_m(nx, ny + nz))
            .vstack(&zero_m(nz, nx + ny).hstack(&eye(nz))),
    )
    .unwrap();

    let mut beta_prime = Vec::new();
    let mut beta = Vec::new();
    let mut beta_dp = Vec::new();
    let mut alpha = Vec::new();
    let mut alpha_dp = Vec::new();
    for _ in 0..2 {
        let a_i = random_auto(&y, cfg, rng); // beta' component
        let a_inv = mor_inverse(&a_i).unwrap();
        let c_i = random_auto(&z, cfg, rng);
        let c_inv = mor_inverse(&c_i).unwrap();
        let rho = random_auto(&x, cfg, rng);
        let ty = random_shear(&x, &y, cfg, rng);
        let tz = random_shear(&x, &z, cfg, rng);
        // beta : b -> a, (x, y, z) |-> (A y + Ty x, C z + Tz x)
        let b_map = ty
            .map()
            .hstack(a_i.map())
            .hstack(&zero_m(ny, nz))
            .vstack(&tz.map().hstack(&zero_m(nz, ny)).hstack(c_i.map()));
        let beta_i = Morphism::new(b.clone(), a.clone(), b_map).unwrap();
        // beta'' : b'' -> a'', (x, z) |-> C z + Tz x
        let bdp_i = Morphism::new(b_dp.clone(), z.clone(), tz.map().hstack(c_i.map())).unwrap();
        // alpha : x -> b, x |-> (rho x, -A^-1 Ty rho x, -C^-1 Tz rho x)
        let mid = a_inv.map().mul(ty.map()).mul(rho.map()).neg();
        let low = c_inv.map().mul(tz.map()).mul(rho.map()).neg();
        let alpha_i =
            Morphism::new(x.clone(), b.clone(), rho.map().vstack(&mid).vstack(&low)).unwrap();
        let adp_i = Morphism::new(x.clone(), b_dp.clone(), rho.map().vstack(&low)).unwrap();
        beta_prime.push(a_i);
        beta.push(beta_i);
        beta_dp.push(bdp_i);
        alpha.push(alpha_i);
        alpha_dp.push(adp_i);
    }
    ThreeByThree {
        objects: [
            [y.clone(), a.clone(), z.clone()],
            [y.clone(), b.clone(), b_dp.clone()],
            [zero.clone(), x.clone(), x.clone()],
        ],
        rows: [
            (Edge::single(f_a), Edge::single(g_a)),
            (Edge::single(f_b), Edge::single(g_b)),
            (
                Edge::single(Morphism::zero(&zero, &x)),
                Edge::single(Morphism::identity(&x)),
            ),
        ],
        cols: [
            (
                Edge::single(Morphism::zero(&zero, &y)),
                Edge::new(beta_prime[0].clone(), beta_prime[1].clone()),
            ),
            (
                Edge::new(alpha[0].clone(), alpha[1].clone()),
                Edge::new(beta[0].clone(), beta[1].clone()),
            ),
            (
                Edge::new(alpha_dp[0].clone(), alpha_dp[1].clone()),
                Edge::new(beta_dp[0].clone(), beta_dp[1].clone()),
            ),
        ],
    }
}

/// A seeded input diagram for one derived construction; `twist == false`
/// yields the fully split instance.
pub fn construction_input(
    c: resolution::Construction,
    cfg: &GenConfig,
    counter: u64,
    twist: bool,
) -> ThreeByThree {
    let mut rng = cfg.rng(counter.wrapping_add(0xC0));
    match c {
        resolution::Construction::EqualTop => equal_top_input(cfg, &mut rng, twist, twist),
        resolution::Construction::EqualBottom => equal_bottom_input(cfg, &mut rng, twist, twist),
        resolution::Construction::SwapSum => {
            let d = if twist {
                base_dses(cfg, &mut rng)
            } else {
                trivial_split_dses(cfg, &mut rng)
            };
            resolution::swap_sum_schema(&d).expect("schema over one ring")
        }
        resolution::Construction::EqualTopSingleRight => {
            equal_top_single_right_input(cfg, &mut rng, twist)
        }
        resolution::Construction::Witness => {
            let d = if twist {
                base_dses(cfg, &mut rng)
            } else {
                trivial_split_dses(cfg, &mut rng)
            };
            resolution::phi_auto(&d)
                .expect("phi of a valid sequence")
                .witness3x3
        }
        resolution::Construction::VerticalIso => {
            let d = if twist {
                base_dses(cfg, &mut rng)
            } else {
                trivial_split_dses(cfg, &mut rng)
            };
            let spec = VerticalIsoSpec {
                left: twist,
                middle: twist,
                right: twist,
            };
            vertical_iso_input(&d, &spec, cfg, &mut rng)
        }
    }
}

fn trivial_split_dses(cfg: &GenConfig, rng: &mut Rng64) -> DoubleSes {
    let r1 = 1 + rng.below(2);
    let r2 = 1 + rng.below(2);
    let x = PresentedObject::free(cfg.ring, r1);
    let y = PresentedObject::free(cfg.ring, r2);
    let b = biproduct(&x, &y).unwrap();
    DoubleSes::trivial(&b.i_l, &b.p_r)
}

fn free_base_dses(cfg: &GenConfig, rng: &mut Rng64) -> DoubleSes {
    let r1 = 1 + rng.below(cfg.max_rank.min(2));
    let r2 = 1 + rng.below(cfg.max_rank.min(2));
    free_dses_with_rng(cfg, rng, r1, r2)
}

/// The fully split instance of one relation-preservation lemma's schema.
pub fn relation_input_split(kind: resolution::RelationKind, cfg: &GenConfig) -> ThreeByThree {
    use resolution::RelationKind as K;
    let mut rng = cfg.rng(0x5B);
    match kind {
        K::T0VerticalIso | K::T2VerticalIso | K::T1IsoTwist => {
            let d = trivial_split_dses(cfg, &mut rng);
            vertical_iso_input(
                &d,
                &VerticalIsoSpec {
                    left: false,
                    middle: false,
                    right: false,
                },
                cfg,
                &mut rng,
            )
        }
        K::T0EqualTop => {
            let mut plain = cfg.clone();
            plain.entry_bound = 0;
            let mut z = Rng64::stream(0, 0);
            equal_top_relation_input(&plain, &mut z, false)
        }
        K::T1ColumnSum => {
            let mut plain = cfg.clone();
            plain.entry_bound = 0;
            let mut z = Rng64::stream(0, 0);
            equal_bottom_relation_input(&plain, &mut z, false)
        }
        K::T0SwapSum | K::T1SwapSum | K::T2SwapSum => {
            let d = trivial_split_dses(cfg, &mut rng);
            resolution::swap_sum_schema(&d).expect("schema over one ring")
        }
        K::T1Witness | K::T2Witness => {
            let d = trivial_split_dses(cfg, &mut rng);
            resolution::phi_auto(&d)
                .expect("phi of a valid sequence")
                .witness3x3
        }
        K::T2ConsNew => equal_top_single_right_input(cfg, &mut rng, false),
        K::T2LemmaPl => lemma_pl_schema(&PresentedObject::free(cfg.ring, 1)),
    }
}

/// A seeded input diagram matching one relation-preservation lemma's schema
/// at its type level.
pub fn relation_input(
    kind: resolution::RelationKind,
    cfg: &GenConfig,
    counter: u64,
) -> ThreeByThree {
    use resolution::RelationKind as K;
    let mut rng = cfg.rng(counter.wrapping_add(0x4E));
    match kind {
        K::T0VerticalIso => {
            let d = base_dses(cfg, &mut rng);
            vertical_iso_input(
                &d,
                &VerticalIsoSpec {
                    left: false,
                    middle: true,
                    right: false,
                },
                cfg,
                &mut rng,
            )
        }
        K::T0EqualTop => equal_top_relation_input(cfg, &mut rng, true),
        K::T0SwapSum => {
            let d = base_dses(cfg, &mut rng);
            resolution::swap_sum_schema(&d).expect("schema over one ring")
        }
        K::T1IsoTwist => {
            let d = free_base_dses(cfg, &mut rng);
            vertical_iso_input(
                &d,
                &VerticalIsoSpec {
                    left: false,
                    middle: false,
                    right: true,
                },
                cfg,
                &mut rng,
            )
        }
        K::T1SwapSum => {
            let d = free_base_dses(cfg, &mut rng);
            resolution::swap_sum_schema(&d).expect("schema over one ring")
        }
        K::T1ColumnSum => equal_bottom_relation_input(cfg, &mut rng, true),
        K::T1Witness | K::T2Witness => {
            let d = free_base_dses(cfg, &mut rng);
            resolution::phi_auto(&d)
                .expect("phi of a valid sequence")
                .witness3x3
        }
        K::T2ConsNew => equal_top_single_right_input(cfg, &mut rng, true),
        K::T2VerticalIso => {
            let d = free_base_dses(cfg, &mut rng);
            vertical_iso_input(
                &d,
                &VerticalIsoSpec {
                    left: false,
                    middle: true,
                    right: false,
                },
                cfg,
                &mut rng,
            )
        }
        K::T2SwapSum => {
            let d = free_base_dses(cfg, &mut rng);
            resolution::swap_sum_schema(&d).expect("schema over one ring")
        }
        K::T2LemmaPl => {
            let n = 1 + rng.below(cfg.max_rank.min(3));
            lemma_pl_schema(&PresentedObject::free(cfg.ring, n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::{validate_3x3, validate_dses};
    use crate::linalg::{det, is_unimodular};

    fn zcfg(seed: u64) -> GenConfig {
        GenConfig::new(BaseRing::Integers, seed)
    }

    fn fcfg(seed: u64) -> GenConfig {
        GenConfig::new(BaseRing::prime_field(5).unwrap(), seed)
    }

    #[test]
    fn rng_is_deterministic() {
        let mut a = Rng64::stream(42, 7);
        let mut b = Rng64::stream(42, 7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = Rng64::stream(42, 8);
        assert_ne!(a.next_u64(), c.next_u64());
    }

    #[test]
    fn unimodular_samples() {
        let cfg = zcfg(3);
        assert_eq!(random_unimodular(&cfg, 0, 0).rows(), 0);
        let one = random_unimodular(&cfg, 1, 1);
        assert_eq!(one.at(0, 0).magnitude().to_string(), "1");
        for i in 0..100 {
            let n = 1 + (i % 5) as usize;
            let m = random_unimodular(&cfg, i, n);
            assert!(is_unimodular(&m), "sample {i}");
        }
        let f = fcfg(3);
        for i in 0..50 {
            let m = random_unimodular(&f, i, 2 + (i % 3) as usize);
            assert!(!det(&m).unwrap().eq(&BigInt::from(0)));
        }
    }

    #[test]
    fn free_dses_validates_and_repeats() {
        for cfg in [zcfg(9), fcfg(9)] {
            for i in 0..20 {
                let d = random_free_dses(&cfg, i, 1 + (i % 2) as usize, 1 + (i % 3) as usize);
                assert!(validate_dses(&d).is_valid(), "sample {i}");
            }
            let a = random_free_dses(&cfg, 5, 2, 1);
            let b = random_free_dses(&cfg, 5, 2, 1);
            assert_eq!(a, b, "same seed and stream give identical values");
        }
    }

    #[test]
    fn zero_rank_dses_is_degenerate_but_valid() {
        let d = random_free_dses(&zcfg(1), 0, 0, 0);
        assert!(validate_dses(&d).is_valid());
        assert!(d.a.is_zero_object());
    }

    #[test]
    fn general_dses_validates_and_reports_types() {
        let cfg = zcfg(11);
        let mut seen = std::collections::BTreeSet::new();
        for i in 0..40 {
            let d = random_general_dses(&cfg, i);
            assert!(validate_dses(&d).is_valid(), "sample {i}");
            seen.insert(crate::diagrams::dses_type(&d));
        }
        assert!(seen.len() >= 2, "types vary: {seen:?}");
    }

    #[test]
    fn general_dses_trivial_extras_give_zero_kernel() {
        // when no palette entry lands and extras are unit-ish the kernel can vanish;
        // the dedicated torsion generator always carries torsion instead
        let cfg = zcfg(13);
        for i in 0..10 {
            let d = random_torsion_type0_dses(&cfg, i);
            assert!(validate_dses(&d).is_valid());
            assert_eq!(crate::diagrams::dses_type(&d), 0);
            assert!(!d.a_prime.is_in_f());
        }
    }

    #[test]
    fn strategies_generate_valid_diagrams() {
        for cfg in [zcfg(21), fcfg(21)] {
            for (s, n) in [
                (Strategy::A, 6u64),
                (Strategy::B, 6),
                (Strategy::C, 6),
                (Strategy::D, 4),
            ] {
                for i in 0..n {
                    let t = random_3x3(&cfg, i, s);
                    let rep = validate_3x3(&t);
                    assert!(rep.is_valid(), "strategy {s:?} sample {i}: {rep}");
                }
            }
        }
    }

    #[test]
    fn strategy_c_with_trivial_input_contains_the_pl_shape() {
        // the middle column of the swap-sum schema is the (i_r, i_l; -p_l, p_r)
        // sequence; with a trivial double sequence the diagram specializes to
        // the vanishing lemma's shape
        let a = PresentedObject::free(BaseRing::Integers, 1);
        let b = biproduct(&a, &a).unwrap();
        let d = DoubleSes::trivial(&b.i_l, &b.p_r);
        let t = resolution::swap_sum_schema(&d).unwrap();
        assert!(validate_3x3(&t).is_valid());
        let vm = t.col_dses(1);
        let pl = crate::diagrams::lemma_pl_dses(&d.a);
        assert_eq!(vm.f1.map(), pl.f1.map());
        assert_eq!(vm.g2.map(), pl.g2.map());
    }

    #[test]
    fn lemma_pl_schema_validates() {
        for ring in [BaseRing::Integers, BaseRing::prime_field(5).unwrap()] {
            let a = PresentedObject::free(ring, 2);
            let t = lemma_pl_schema(&a);
            assert!(validate_3x3(&t).is_valid());
        }
    }

    #[test]
    fn seeded_fixture_is_stable() {
        // regression fixture: the sample drawn from seed 7, stream 0, with
        // ranks (2, 1); the exact entries are pinned from the first run
        let d = random_free_dses(&zcfg(7), 0, 2, 1);
        let as_strings =
            |m: &Matrix| -> Vec<String> { m.entries().iter().map(|e| e.to_string()).collect() };
        assert_eq!(as_strings(d.f1.map()), ["0", "-1", "1", "0", "0", "-1"]);
        assert_eq!(as_strings(d.f2.map()), ["0", "-1", "1", "1", "1", "0"]);
        assert_eq!(as_strings(d.g1.map()), ["1", "0", "-1"]);
        assert_eq!(as_strings(d.g2.map()), ["1", "1", "-1"]);
    }

    #[test]
    fn general_dses_kernel_edges() {
        // with no appended columns the quotient is an isomorphism and the
        // kernel object vanishes
        let z = BaseRing::Integers;
        let rel = Matrix::from_i64(z, 2, 1, &[4, 0]);
        let a = PresentedObject::new(z, 2, rel.clone());
        let same = PresentedObject::new(z, 2, rel.clone());
        let g = Morphism::new(a.clone(), same, Matrix::identity(z, 2)).unwrap();
        let (k, _) = crate::category::kernel(&g);
        assert!(k.is_zero_object());
        // appending a generator column kills it: the quotient's invariants shrink
        let extra = Matrix::from_i64(z, 2, 1, &[0, 1]);
        let smaller = PresentedObject::new(z, 2, rel.hstack(&extra));
        assert_eq!(smaller.iso_invariants(), (0, vec![BigInt::from(4)]));
        assert_eq!(a.iso_invariants(), (1, vec![BigInt::from(4)]));
    }

    #[test]
    fn relation_inputs_match_their_levels() {
        for cfg in [zcfg(17), fcfg(17)] {
            for kind in resolution::RelationKind::all() {
                let t = relation_input(kind, &cfg, 3);
                let rep = validate_3x3(&t);
                assert!(rep.is_valid(), "{} over {:?}: {rep}", kind.name(), cfg.ring);
                let mins = [t.h_t(), t.h_m(), t.h_b(), t.v_l(), t.v_m(), t.v_r()]
                    .iter()
                    .map(crate::diagrams::dses_type)
                    .min()
                    .unwrap();
                assert!(mins >= kind.level(), "{}: type {mins}", kind.name());
            }
        }
    }
}

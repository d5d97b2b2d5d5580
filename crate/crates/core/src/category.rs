//! The concrete exact category: finitely presented modules over the base
//! ring, with kernels, pullbacks, biproducts and free covers.
//!
//! An object is a cokernel presentation: `generators` free coordinates
//! modulo the column span of `relations`. Object equality is presentation
//! identity; isomorphism is a separate notion through [`PresentedObject::iso_invariants`].
//! The resolving subcategory F consists of the objects with no torsion
//! invariants (over a prime field that is every object).

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::linalg::{self, BaseRing, Matrix};

/// A finitely presented module: the cokernel of `relations` acting on the
/// rank-`generators` free module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentedObject {
    ring: BaseRing,
    generators: usize,
    relations: Matrix,
}

impl PresentedObject {
    pub fn new(ring: BaseRing, generators: usize, relations: Matrix) -> PresentedObject {
        assert_eq!(
            relations.ring(),
            ring,
            "relations must live over the object's ring"
        );
        assert_eq!(
            relations.rows(),
            generators,
            "relations must have one row per generator"
        );
        PresentedObject {
            ring,
            generators,
            relations,
        }
    }

    /// Free object of the given rank (no relation columns).
    pub fn free(ring: BaseRing, rank: usize) -> PresentedObject {
        PresentedObject::new(ring, rank, Matrix::zero(ring, rank, 0))
    }

    /// The zero object.
    pub fn zero(ring: BaseRing) -> PresentedObject {
        PresentedObject::free(ring, 0)
    }

    pub fn from_presentation(relations: Matrix) -> PresentedObject {
        PresentedObject::new(relations.ring(), relations.rows(), relations)
    }

    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &Matrix {
        &self.relations
    }

    /// Isomorphism invariants `(free_rank, torsion_divisors)` read off the
    /// Smith form of the presentation. Divisors equal to 1 are invisible;
    /// over a prime field the torsion list is always empty.
    pub fn iso_invariants(&self) -> (usize, Vec<BigInt>) {
        let s = linalg::snf(&self.relations);
        let torsion: Vec<BigInt> = s.divisors.iter().filter(|d| !d.is_one()).cloned().collect();
        (self.generators - s.divisors.len(), torsion)
    }

    /// Membership in the resolving subcategory: no torsion invariants.
    pub fn is_in_f(&self) -> bool {
        self.iso_invariants().1.is_empty()
    }

    pub fn is_zero_object(&self) -> bool {
        let (fr, t) = self.iso_invariants();
        fr == 0 && t.is_empty()
    }

    /// The diagonal presentation with the same invariants. Presentations are
    /// never normalized implicitly; this is the explicit request.
    pub fn canonical_form(&self) -> PresentedObject {
        let (free_rank, torsion) = self.iso_invariants();
        let n = free_rank + torsion.len();
        let mut rel = Matrix::zero(self.ring, n, torsion.len());
        for (j, d) in torsion.iter().enumerate() {
            rel.set(j, j, d.clone());
        }
        PresentedObject::new(self.ring, n, rel)
    }

    /// For an object of F, a mutually inverse pair `(chi, chi_inv)` with
    /// `chi: self -> free(free_rank)`. The key property used downstream:
    /// `chi.map * relations = 0` exactly, so matrices conjugated through
    /// `chi` do not depend on representatives modulo the relations.
    pub fn freeing_iso(&self) -> Result<(Morphism, Morphism)> {
        let s = linalg::snf(&self.relations);
        if s.divisors.iter().any(|d| !d.is_one()) {
            return Err(Error::Precondition(
                "freeing isomorphism requires an object with no torsion".into(),
            ));
        }
        let r = s.divisors.len();
        let free = PresentedObject::free(self.ring, self.generators - r);
        let u_inv = linalg::solve_matrix(&s.u, &Matrix::identity(self.ring, self.generators))
            .expect("U from the Smith form is invertible");
        let chi = Morphism::new(
            self.clone(),
            free.clone(),
            s.u.row_slice(r, self.generators),
        )?;
        let chi_inv = Morphism::new(free, self.clone(), u_inv.col_slice(r, self.generators))?;
        Ok((chi, chi_inv))
    }
}

/// A module map, stored as its matrix on generators: `map` has shape
/// `dst.generators x src.generators`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    src: PresentedObject,
    dst: PresentedObject,
    map: Matrix,
}

impl Morphism {
    /// Checked constructor: the matrix must carry relations of the source
    /// into the relation span of the destination.
    pub fn new(src: PresentedObject, dst: PresentedObject, map: Matrix) -> Result<Morphism> {
        if map.rows() != dst.generators() || map.cols() != src.generators() {
            return Err(Error::Dimension(format!(
                "morphism matrix is {}x{}, expected {}x{}",
                map.rows(),
                map.cols(),
                dst.generators(),
                src.generators()
            )));
        }
        if src.ring() != dst.ring() || map.ring() != src.ring() {
            return Err(Error::RingMismatch(
                "morphism endpoints must share one ring".into(),
            ));
        }
        let carried = map.mul(src.relations());
        if !linalg::column_span_membership(dst.relations(), &carried) {
            return Err(Error::Precondition(
                "matrix does not define a morphism: relations are not carried into relations"
                    .into(),
            ));
        }
        Ok(Morphism { src, dst, map })
    }

    /// Constructor that skips the well-definedness check; dimensions and the
    /// ring must still agree. Loaders use this so that validation can report
    /// findings instead of refusing the data.
    pub fn new_unchecked(
        src: PresentedObject,
        dst: PresentedObject,
        map: Matrix,
    ) -> Result<Morphism> {
        if map.rows() != dst.generators() || map.cols() != src.generators() {
            return Err(Error::Dimension(format!(
                "morphism matrix is {}x{}, expected {}x{}",
                map.rows(),
                map.cols(),
                dst.generators(),
                src.generators()
            )));
        }
        if src.ring() != dst.ring() || map.ring() != src.ring() {
            return Err(Error::RingMismatch(
                "morphism endpoints must share one ring".into(),
            ));
        }
        Ok(Morphism { src, dst, map })
    }

    pub fn identity(x: &PresentedObject) -> Morphism {
        Morphism {
            src: x.clone(),
            dst: x.clone(),
            map: Matrix::identity(x.ring(), x.generators()),
        }
    }

    pub fn zero(src: &PresentedObject, dst: &PresentedObject) -> Morphism {
        Morphism {
            src: src.clone(),
            dst: dst.clone(),
            map: Matrix::zero(src.ring(), dst.generators(), src.generators()),
        }
    }

    pub fn src(&self) -> &PresentedObject {
        &self.src
    }

    pub fn dst(&self) -> &PresentedObject {
        &self.dst
    }

    pub fn map(&self) -> &Matrix {
        &self.map
    }

    pub fn ring(&self) -> BaseRing {
        self.src.ring()
    }

    pub fn neg(&self) -> Morphism {
        Morphism {
            src: self.src.clone(),
            dst: self.dst.clone(),
            map: self.map.neg(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Morphism {
        Morphism {
            src: self.src.clone(),
            dst: self.dst.clone(),
            map: self.map.scale(c),
        }
    }

    pub fn add(&self, other: &Morphism) -> Result<Morphism> {
        if self.src != other.src || self.dst != other.dst {
            return Err(Error::ObjectMismatch(
                "sum of morphisms with different endpoints".into(),
            ));
        }
        Ok(Morphism {
            src: self.src.clone(),
            dst: self.dst.clone(),
            map: self.map.add(&other.map),
        })
    }
}

/// Whether the matrix carries source relations into destination relations.
pub fn well_defined(f: &Morphism) -> bool {
    let carried = f.map.mul(f.src.relations());
    linalg::column_span_membership(f.dst.relations(), &carried)
}

/// `g` after `f`; the shared object must be presentation-identical.
pub fn compose(g: &Morphism, f: &Morphism) -> Result<Morphism> {
    if f.dst != g.src {
        return Err(Error::ObjectMismatch(
            "compose requires dst(f) and src(g) to be the same presentation".into(),
        ));
    }
    Ok(Morphism {
        src: f.src.clone(),
        dst: g.dst.clone(),
        map: g.map.mul(&f.map),
    })
}

/// Equality modulo the destination's relations.
pub fn mor_equal(f: &Morphism, g: &Morphism) -> Result<bool> {
    if f.src != g.src || f.dst != g.dst {
        return Err(Error::ObjectMismatch(
            "mor_equal requires identical source and destination presentations".into(),
        ));
    }
    let diff = f.map.sub(&g.map);
    Ok(linalg::column_span_membership(f.dst.relations(), &diff))
}

pub fn is_zero_mor(f: &Morphism) -> bool {
    linalg::column_span_membership(f.dst.relations(), &f.map)
}

/// Surjectivity of the induced map on cokernels: the map's columns together
/// with the destination's relations span the destination's free cover.
pub fn is_admissible_epi(f: &Morphism) -> bool {
    let ring = f.ring();
    let n = f.dst.generators();
    let aug = f.map.hstack(f.dst.relations());
    linalg::column_span_membership(&aug, &Matrix::identity(ring, n))
}

/// Injectivity: the kernel object is the zero object.
pub fn is_admissible_mono(f: &Morphism) -> bool {
    kernel(f).0.is_zero_object()
}

/// Kernel by the lift-and-syzygy method. Returns the kernel object together
/// with its inclusion; the inclusion is an admissible mono and every map
/// killed by `f` factors through it (see [`lift_through`]).
pub fn kernel(f: &Morphism) -> (PresentedObject, Morphism) {
    let ring = f.ring();
    // lattice of source-cover elements mapped into the destination's relations
    let aug = f.map.hstack(f.dst.relations());
    let kb = linalg::kernel_basis(&aug);
    let l = kb.row_slice(0, f.src.generators());
    // syzygies of the chosen generators, modulo the source relations
    let syz = linalg::kernel_basis(&l.hstack(f.src.relations()));
    let rel = syz.row_slice(0, l.cols());
    let k = PresentedObject::new(ring, l.cols(), rel);
    let incl = Morphism {
        src: k.clone(),
        dst: f.src.clone(),
        map: l,
    };
    (k, incl)
}

/// Factor `g` through `f`: an `h` with `f . h = g`, when the matrix-level
/// factorization exists and is itself well-defined.
pub fn lift_through(f: &Morphism, g: &Morphism) -> Option<Morphism> {
    if f.dst != g.dst {
        return None;
    }
    let aug = f.map.hstack(f.dst.relations());
    let sol = linalg::solve_matrix(&aug, &g.map)?;
    let h = sol.row_slice(0, f.src.generators());
    Morphism::new(g.src.clone(), f.src.clone(), h).ok()
}

/// Two-sided inverse of an isomorphism, when it exists.
pub fn mor_inverse(f: &Morphism) -> Option<Morphism> {
    let id_dst = Morphism::identity(&f.dst);
    let g = lift_through(f, &id_dst)?;
    let round = compose(&g, f).ok()?;
    if mor_equal(&round, &Morphism::identity(&f.src)).ok()? {
        Some(g)
    } else {
        None
    }
}

/// The biproduct with its four structure maps.
#[derive(Debug, Clone)]
pub struct Biproduct {
    pub sum: PresentedObject,
    pub i_l: Morphism,
    pub i_r: Morphism,
    pub p_l: Morphism,
    pub p_r: Morphism,
}

pub fn biproduct(x: &PresentedObject, y: &PresentedObject) -> Result<Biproduct> {
    if x.ring() != y.ring() {
        return Err(Error::RingMismatch(
            "biproduct of objects over different rings".into(),
        ));
    }
    let ring = x.ring();
    let (nx, ny) = (x.generators(), y.generators());
    let sum = PresentedObject::new(ring, nx + ny, x.relations().block_diag(y.relations()));
    let ix = Matrix::identity(ring, nx);
    let iy = Matrix::identity(ring, ny);
    let i_l = Morphism {
        src: x.clone(),
        dst: sum.clone(),
        map: ix.vstack(&Matrix::zero(ring, ny, nx)),
    };
    let i_r = Morphism {
        src: y.clone(),
        dst: sum.clone(),
        map: Matrix::zero(ring, nx, ny).vstack(&iy),
    };
    let p_l = Morphism {
        src: sum.clone(),
        dst: x.clone(),
        map: ix.hstack(&Matrix::zero(ring, nx, ny)),
    };
    let p_r = Morphism {
        src: sum.clone(),
        dst: y.clone(),
        map: Matrix::zero(ring, ny, nx).hstack(&iy),
    };
    Ok(Biproduct {
        sum,
        i_l,
        i_r,
        p_l,
        p_r,
    })
}

/// Pullback of a cospan, computed as the kernel of the difference map on the
/// biproduct. When both legs are admissible epis, so are both projections.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub object: PresentedObject,
    pub pi1: Morphism,
    pub pi2: Morphism,
}

pub fn pullback(g1: &Morphism, g2: &Morphism) -> Result<Pullback> {
    if g1.dst != g2.dst {
        return Err(Error::ObjectMismatch(
            "pullback legs must share their codomain".into(),
        ));
    }
    let b = biproduct(&g1.src, &g2.src)?;
    let diff = Morphism {
        src: b.sum.clone(),
        dst: g1.dst.clone(),
        map: g1.map.hstack(&g2.map.neg()),
    };
    let (p, incl) = kernel(&diff);
    let pi1 = compose(&b.p_l, &incl)?;
    let pi2 = compose(&b.p_r, &incl)?;
    Ok(Pullback {
        object: p,
        pi1,
        pi2,
    })
}

/// The canonical free cover: the free object on the generators with the
/// generator projection, always an admissible epi.
pub fn free_cover(x: &PresentedObject) -> (PresentedObject, Morphism) {
    let p = PresentedObject::free(x.ring(), x.generators());
    let psi = Morphism {
        src: p.clone(),
        dst: x.clone(),
        map: Matrix::identity(x.ring(), x.generators()),
    };
    (p, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn z() -> BaseRing {
        BaseRing::Integers
    }

    fn gf(p: u64) -> BaseRing {
        BaseRing::prime_field(p).unwrap()
    }

    fn z_mod(n: i64) -> PresentedObject {
        PresentedObject::from_presentation(Matrix::from_i64(z(), 1, 1, &[n]))
    }

    #[test]
    fn free_zero_and_cyclic() {
        assert!(PresentedObject::free(z(), 0).is_zero_object());
        let c5 = z_mod(5);
        assert_eq!(c5.iso_invariants(), (0, vec![BigInt::from(5)]));
        // a divisor of 1 kills the generator
        let trivial = z_mod(1);
        assert!(trivial.is_zero_object());
    }

    #[test]
    fn invariants_examples() {
        let x = PresentedObject::new(z(), 2, Matrix::from_i64(z(), 2, 1, &[4, 0]));
        assert_eq!(x.iso_invariants(), (1, vec![BigInt::from(4)]));
        assert!(!x.is_in_f());
        assert!(PresentedObject::free(z(), 3).is_in_f());
        let d23 = PresentedObject::from_presentation(Matrix::from_i64(z(), 2, 2, &[2, 0, 0, 3]));
        assert_eq!(d23.iso_invariants(), (0, vec![BigInt::from(6)]));
        // over a prime field every object is a vector space
        let fp = PresentedObject::from_presentation(Matrix::from_i64(gf(5), 2, 1, &[5, 1]));
        assert!(fp.is_in_f());
    }

    #[test]
    fn canonical_form_matches_invariants() {
        let x =
            PresentedObject::from_presentation(Matrix::from_i64(z(), 3, 2, &[2, 0, 0, 3, 4, 4]));
        let c = x.canonical_form();
        assert_eq!(c.iso_invariants(), x.iso_invariants());
    }

    #[test]
    fn composition_and_equality_mod_relations() {
        let c5 = z_mod(5);
        let f = Morphism::new(c5.clone(), c5.clone(), Matrix::from_i64(z(), 1, 1, &[1])).unwrap();
        let g = Morphism::new(c5.clone(), c5.clone(), Matrix::from_i64(z(), 1, 1, &[6])).unwrap();
        assert!(
            mor_equal(&f, &g).unwrap(),
            "maps differing by a relation column coincide"
        );
        let id = Morphism::identity(&c5);
        assert!(mor_equal(&compose(&id, &f).unwrap(), &f).unwrap());
        // distinct presentations refuse comparison
        let other = PresentedObject::free(z(), 1);
        let h = Morphism::identity(&other);
        assert!(mor_equal(&f, &h).is_err());
    }

    #[test]
    fn well_definedness_is_checked() {
        let c5 = z_mod(5);
        let free = PresentedObject::free(z(), 1);
        // 1: Z/5 -> Z does not carry 5 into 0
        assert!(
            Morphism::new(c5.clone(), free.clone(), Matrix::from_i64(z(), 1, 1, &[1])).is_err()
        );
        // 5: Z -> Z/25 is fine, 1: Z/5 -> Z/25 is not
        let c25 = z_mod(25);
        assert!(Morphism::new(c5, c25, Matrix::from_i64(z(), 1, 1, &[1])).is_err());
    }

    #[test]
    fn biproduct_identities() {
        let x = PresentedObject::from_presentation(Matrix::from_i64(z(), 2, 1, &[2, 0]));
        let y = PresentedObject::free(z(), 1);
        let b = biproduct(&x, &y).unwrap();
        assert!(mor_equal(&compose(&b.p_l, &b.i_l).unwrap(), &Morphism::identity(&x)).unwrap());
        assert!(mor_equal(&compose(&b.p_r, &b.i_r).unwrap(), &Morphism::identity(&y)).unwrap());
        assert!(is_zero_mor(&compose(&b.p_l, &b.i_r).unwrap()));
        assert!(is_zero_mor(&compose(&b.p_r, &b.i_l).unwrap()));
        let recomposed = compose(&b.i_l, &b.p_l)
            .unwrap()
            .add(&compose(&b.i_r, &b.p_r).unwrap())
            .unwrap();
        assert!(mor_equal(&recomposed, &Morphism::identity(&b.sum)).unwrap());
        // zero summand gives an isomorphic injection
        let b0 = biproduct(&PresentedObject::zero(z()), &y).unwrap();
        assert!(mor_inverse(&b0.i_r).is_some());
        // free + free = free
        let bf = biproduct(
            &PresentedObject::free(z(), 1),
            &PresentedObject::free(z(), 1),
        )
        .unwrap();
        assert_eq!(bf.sum.iso_invariants(), (2, vec![]));
    }

    #[test]
    fn mono_epi_examples() {
        let free = PresentedObject::free(z(), 1);
        let id = Morphism::identity(&free);
        assert!(is_admissible_mono(&id) && is_admissible_epi(&id));
        let by5 = Morphism::new(
            free.clone(),
            free.clone(),
            Matrix::from_i64(z(), 1, 1, &[5]),
        )
        .unwrap();
        assert!(is_admissible_mono(&by5));
        assert!(!is_admissible_epi(&by5));
        let c5 = z_mod(5);
        let q = Morphism::new(free, c5, Matrix::from_i64(z(), 1, 1, &[1])).unwrap();
        assert!(is_admissible_epi(&q));
        assert!(!is_admissible_mono(&q));
    }

    #[test]
    fn kernel_examples() {
        let free = PresentedObject::free(z(), 1);
        let (k_id, _) = kernel(&Morphism::identity(&free));
        assert!(k_id.is_zero_object());

        let c5 = z_mod(5);
        let q = Morphism::new(free.clone(), c5, Matrix::from_i64(z(), 1, 1, &[1])).unwrap();
        let (k, incl) = kernel(&q);
        assert_eq!(k.iso_invariants(), (1, vec![]), "kernel of Z -> Z/5 is Z");
        assert_eq!(
            incl.map().at(0, 0).abs(),
            BigInt::from(5),
            "included by multiplication by 5"
        );
        assert!(is_admissible_mono(&incl));
        assert!(is_zero_mor(&compose(&q, &incl).unwrap()));

        let x = PresentedObject::free(z(), 2);
        let b = biproduct(&x, &free).unwrap();
        let (kp, _) = kernel(&b.p_r);
        assert_eq!(kp.iso_invariants(), x.iso_invariants());
    }

    #[test]
    fn kernel_universal_property() {
        // g with f.g = 0 factors uniquely through the kernel inclusion
        let free2 = PresentedObject::free(z(), 2);
        let c4 = z_mod(4);
        let f = Morphism::new(free2.clone(), c4, Matrix::from_i64(z(), 1, 2, &[1, 2])).unwrap();
        let (k, incl) = kernel(&f);
        let w = PresentedObject::free(z(), 1);
        for cols in [[4i64, 0], [2, 1], [0, 2]] {
            let g = Morphism::new(w.clone(), free2.clone(), Matrix::from_i64(z(), 2, 1, &cols))
                .unwrap();
            assert!(is_zero_mor(&compose(&f, &g).unwrap()));
            let h = lift_through(&incl, &g).expect("factorization exists");
            assert!(mor_equal(&compose(&incl, &h).unwrap(), &g).unwrap());
            assert_eq!(h.src(), &w);
            assert_eq!(h.dst(), &k);
        }
    }

    #[test]
    fn pullback_examples() {
        let free = PresentedObject::free(z(), 1);
        let id = Morphism::identity(&free);
        let pb = pullback(&id, &id).unwrap();
        assert_eq!(pb.object.iso_invariants(), (1, vec![]), "diagonal");
        assert!(mor_inverse(&pb.pi1).is_some());
        assert!(mor_inverse(&pb.pi2).is_some());

        // over GF(5): pullback of 1 and 2 is the line x = 2y
        let l = PresentedObject::free(gf(5), 1);
        let one = Morphism::identity(&l);
        let two = Morphism::new(l.clone(), l.clone(), Matrix::from_i64(gf(5), 1, 1, &[2])).unwrap();
        let pb2 = pullback(&one, &two).unwrap();
        assert_eq!(pb2.object.iso_invariants().0, 1);
        let double = pb2.pi2.scale(&BigInt::from(2));
        assert!(mor_equal(&pb2.pi1, &double).unwrap(), "pi1 = 2 pi2");
        // exhaustive oracle: 5 of the 25 pairs (x, y) satisfy x = 2y
        let mut count = 0;
        for x in 0..5i64 {
            for y in 0..5i64 {
                if (x - 2 * y) % 5 == 0 {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 5);

        // two epis from dimension 2 onto dimension 1: kernel count 2 + 2 - 1
        let pl = PresentedObject::free(gf(5), 2);
        let e1 = Morphism::new(
            pl.clone(),
            l.clone(),
            Matrix::from_i64(gf(5), 1, 2, &[1, 0]),
        )
        .unwrap();
        let e2 = Morphism::new(
            pl.clone(),
            l.clone(),
            Matrix::from_i64(gf(5), 1, 2, &[1, 1]),
        )
        .unwrap();
        let pb3 = pullback(&e1, &e2).unwrap();
        assert_eq!(pb3.object.iso_invariants().0, 3);
        assert!(is_admissible_epi(&pb3.pi1));
        assert!(is_admissible_epi(&pb3.pi2));
    }

    #[test]
    fn free_cover_examples() {
        let c5 = z_mod(5);
        let (p, psi) = free_cover(&c5);
        assert_eq!(p.iso_invariants(), (1, vec![]));
        assert!(is_admissible_epi(&psi));
        let f = PresentedObject::free(z(), 2);
        let (pf, psif) = free_cover(&f);
        assert_eq!(pf, f);
        assert!(mor_inverse(&psif).is_some());
        let mixed = PresentedObject::new(z(), 2, Matrix::from_i64(z(), 2, 1, &[2, 0]));
        let (pm, psim) = free_cover(&mixed);
        assert_eq!(pm.iso_invariants(), (2, vec![]));
        assert!(is_admissible_epi(&psim));
    }

    #[test]
    fn biproduct_identities_on_random_pairs() {
        let cfg = crate::gen::GenConfig::new(z(), 41);
        for i in 0..40u64 {
            let d = crate::gen::random_general_dses(&cfg, i);
            let (x, y) = (&d.a, &d.a_dprime);
            let b = biproduct(x, y).unwrap();
            assert!(mor_equal(&compose(&b.p_l, &b.i_l).unwrap(), &Morphism::identity(x)).unwrap());
            assert!(mor_equal(&compose(&b.p_r, &b.i_r).unwrap(), &Morphism::identity(y)).unwrap());
            assert!(is_zero_mor(&compose(&b.p_l, &b.i_r).unwrap()));
            assert!(is_zero_mor(&compose(&b.p_r, &b.i_l).unwrap()));
            let id = compose(&b.i_l, &b.p_l)
                .unwrap()
                .add(&compose(&b.i_r, &b.p_r).unwrap())
                .unwrap();
            assert!(
                mor_equal(&id, &Morphism::identity(&b.sum)).unwrap(),
                "pair {i}"
            );
        }
    }

    #[test]
    fn composition_is_associative_on_random_triples() {
        let cfg = crate::gen::GenConfig::new(z(), 43);
        for i in 0..25u64 {
            let d = crate::gen::random_general_dses(&cfg, i);
            // f1: a' -> a, g1: a -> a'', then any endomorphism of a''
            let e = Morphism::identity(&d.a_dprime).scale(&BigInt::from(if i % 2 == 0 {
                1
            } else {
                -1
            }));
            let left = compose(&compose(&e, &d.g1).unwrap(), &d.f1).unwrap();
            let right = compose(&e, &compose(&d.g1, &d.f1).unwrap()).unwrap();
            assert!(mor_equal(&left, &right).unwrap(), "triple {i}");
        }
    }

    #[test]
    fn pullbacks_of_epis_project_onto_epis() {
        let cfg = crate::gen::GenConfig::new(z(), 47);
        for i in 0..25u64 {
            let d = crate::gen::random_general_dses(&cfg, i);
            let e = crate::gen::random_general_dses(&cfg, 1000 + i);
            if d.a_dprime != e.a_dprime {
                continue;
            }
            let pb = pullback(&d.g1, &e.g1).unwrap();
            assert!(is_admissible_epi(&pb.pi1), "pair {i}");
            assert!(is_admissible_epi(&pb.pi2), "pair {i}");
        }
        // a shared-codomain family: two quotients of the same free object
        for i in 0..25u64 {
            let d = crate::gen::random_free_dses(&cfg, 2000 + i, 1 + (i % 2) as usize, 1);
            let pb = pullback(&d.g1, &d.g2).unwrap();
            assert!(is_admissible_epi(&pb.pi1));
            assert!(is_admissible_epi(&pb.pi2));
        }
    }

    #[test]
    fn kernel_universality_on_random_cases() {
        let cfg = crate::gen::GenConfig::new(z(), 53);
        for i in 0..30u64 {
            let d = crate::gen::random_general_dses(&cfg, i);
            let (k, incl) = kernel(&d.g1);
            // any map into the source killed by g factors uniquely
            let w = PresentedObject::free(z(), 1 + (i % 2) as usize);
            let mut rng = crate::gen::Rng64::stream(53, 500 + i);
            let mut hm = Matrix::zero(z(), k.generators(), w.generators());
            for r in 0..hm.rows() {
                for c in 0..hm.cols() {
                    hm.set(r, c, BigInt::from(rng.range_i64(-2, 2)));
                }
            }
            let h = Morphism::new(w.clone(), k.clone(), hm).unwrap();
            let g = compose(&incl, &h).unwrap();
            assert!(is_zero_mor(&compose(&d.g1, &g).unwrap()));
            let back = lift_through(&incl, &g).expect("factorization exists");
            assert!(
                mor_equal(&back, &h).unwrap(),
                "unique modulo relations, case {i}"
            );
        }
    }

    #[test]
    fn freeing_iso_round_trip() {
        // in F but presented with redundant generators and unit relations
        let x = PresentedObject::new(z(), 3, Matrix::from_i64(z(), 3, 2, &[1, 0, 2, 1, 3, 3]));
        assert!(x.is_in_f());
        let (chi, chi_inv) = x.freeing_iso().unwrap();
        assert!(chi.map().mul(x.relations()).is_zero());
        let fwd = compose(&chi, &chi_inv).unwrap();
        assert!(mor_equal(&fwd, &Morphism::identity(chi.dst())).unwrap());
        let back = compose(&chi_inv, &chi).unwrap();
        assert!(mor_equal(&back, &Morphism::identity(&x)).unwrap());
        assert!(z_mod(5).freeing_iso().is_err());
    }
}

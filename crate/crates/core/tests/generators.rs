//! Soak test: every generator's output passes its validator across a larger
//! sample than the unit tests draw.

use k1wb_core::diagrams::{validate_3x3, validate_dses};
use k1wb_core::gen::{self, GenConfig, Strategy};
use k1wb_core::linalg::{self, BaseRing};

#[test]
fn generated_values_validate_in_bulk() {
    let rings = [BaseRing::Integers, BaseRing::default_prime_field()];
    for ring in rings {
        let cfg = GenConfig::new(ring, 77);
        for i in 0..120u64 {
            let m = gen::random_unimodular(&cfg, i, 1 + (i % 5) as usize);
            assert!(linalg::is_unimodular(&m), "unimodular {ring:?} {i}");
        }
        for i in 0..100u64 {
            let d = gen::random_free_dses(&cfg, i, 1 + (i % 3) as usize, 1 + (i % 2) as usize);
            assert!(validate_dses(&d).is_valid(), "free dses {ring:?} {i}");
        }
        for strategy in [Strategy::A, Strategy::B, Strategy::C, Strategy::D] {
            for i in 0..25u64 {
                let t = gen::random_3x3(&cfg, i, strategy);
                assert!(validate_3x3(&t).is_valid(), "{strategy:?} {ring:?} {i}");
            }
        }
    }
    let zcfg = GenConfig::new(BaseRing::Integers, 77);
    for i in 0..100u64 {
        let d = gen::random_general_dses(&zcfg, i);
        assert!(validate_dses(&d).is_valid(), "general dses {i}");
    }
    for i in 0..30u64 {
        let d = gen::random_torsion_type0_dses(&zcfg, i);
        assert!(validate_dses(&d).is_valid(), "torsion dses {i}");
        assert_eq!(k1wb_core::diagrams::dses_type(&d), 0, "torsion dses {i}");
    }
}

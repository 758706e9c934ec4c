//! A 2-twisted channel that annihilates no operator sector, on the doubled
//! regular representation of Z4×Z4. Here every column survives and the
//! invariant is mapped to 2·k0 mod 4 for every starting class.

use sptchan::channel::{detect_twist, Channel, QuantumChannel};
use sptchan::group::FiniteAbelianGroup;
use sptchan::linalg::cr;
use sptchan::mps::random_symmetric_mps;
use sptchan::observables::pattern_extract;
use sptchan::CMat;

/// Basis state `m·16 + i` carries character `i`, whose first residue is `i mod 4`.
/// Kraus `K_m` sends `(α, m)` to `(σ*α, j)` where `σ = diag(2, 1)` doubles the
/// first residue and `j ∈ {0, 1}` tells the two preimages of `σ*α` apart.
fn generic_two_twist(group: &FiniteAbelianGroup) -> QuantumChannel {
    let kraus = (0..2)
        .map(|m| {
            let mut k = CMat::zeros(32, 32);
            for i in 0..16 {
                let alpha = group.character_at(i);
                let r = alpha.residues();
                let image = group.character(&[(2 * r[0]) as i64, r[1] as i64]).unwrap();
                let j = r[0] / 2;
                k[(j * 16 + group.character_index(&image), m * 16 + i)] = cr(1.0);
            }
            k
        })
        .collect();
    QuantumChannel::new(kraus).unwrap()
}

#[test]
fn generic_two_twist_maps_every_class() {
    let group = FiniteAbelianGroup::square(4).unwrap();
    let ch = generic_two_twist(&group);
    assert!(ch.validate().pass);
    for k0 in 0..4usize {
        let bond = if k0 == 0 { 16 } else { 4 };
        for seed in 0..2u64 {
            let st = random_symmetric_mps(&group, k0, bond, 32, seed).unwrap();
            if k0 == 0 && seed == 0 {
                let twist = detect_twist(&ch, &st.rep).unwrap().expect("twisted strong symmetry");
                assert_eq!(twist.sigma.matrix(), &[vec![2, 0], vec![0, 1]]);
                assert!(twist.theta.is_trivial(1e-10));
            }
            let report = pattern_extract(&st, Some(&ch as &dyn Channel)).unwrap();
            assert!(report.pattern.is_total(), "k0={k0} seed={seed}: {:?}", report.pattern.empty_columns());
            assert_eq!(report.invariant, Some(2 * k0 % 4), "k0={k0} seed={seed}");
            assert!(report.routes_agree);
        }
    }
}

mod common;

use cliquedesign::assembler::sampler::Sampler;
use cliquedesign::clique::{enumerate_maximum_cliques, SearchOptions};
use cliquedesign::derange::DesignKind;
use cliquedesign::oracle::{
    chi_square_sf, latin_squares, ln_gamma, sudoku_grids, uniformity_test, uniformity_test_with,
};
use cliquedesign::Error;
use common::latin_graph;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma as reference_ln_gamma;

pub const LATIN_SEED: u64 = 1;
pub const SUDOKU_SEED: u64 = 1;

#[test]
fn ln_gamma_matches_reference() {
    for i in 1..400 {
        let x = i as f64 * 0.37;
        let (a, b) = (ln_gamma(x), reference_ln_gamma(x));
        assert!(
            (a - b).abs() <= 1e-10 * b.abs().max(1.0),
            "x={x}: {a} vs {b}"
        );
    }
}

#[test]
fn chi_square_tail_matches_reference() {
    for df in [1usize, 2, 3, 10, 287, 575, 5000] {
        let dist = ChiSquared::new(df as f64).unwrap();
        for q in [0.001, 0.05, 0.3, 0.5, 0.7, 0.95, 0.999] {
            let x = dist.inverse_cdf(q);
            let ours = chi_square_sf(x, df);
            assert!((ours - (1.0 - q)).abs() < 1e-8, "df={df} q={q}: {ours}");
        }
    }
}

#[test]
fn latin_order_4_is_uniform() {
    let r = uniformity_test(DesignKind::Latin, 4, 57_600, LATIN_SEED).unwrap();
    assert_eq!(r.df, 575);
    println!("{r:?}");
    assert!(r.p_value > 0.001 && r.p_value < 0.999, "{r:?}");
}

#[test]
fn sudoku_p2_is_uniform() {
    let r = uniformity_test(DesignKind::Sudoku, 2, 28_800, SUDOKU_SEED).unwrap();
    assert_eq!(r.df, 287);
    println!("{r:?}");
    assert!(r.p_value > 0.001 && r.p_value < 0.999, "{r:?}");
}

#[test]
fn fixed_clique_sampler_is_rejected() {
    let g = latin_graph(4);
    let cs = enumerate_maximum_cliques(&g, Some(3), &SearchOptions::default()).unwrap();
    let sampler = Sampler::new(cs, None, LATIN_SEED).unwrap();
    let population = latin_squares(4).unwrap();
    let r = uniformity_test_with(&population, 57_600, |i| {
        Ok(sampler
            .sample_with_clique(i, 0)?
            .design
            .grid()
            .cells()
            .to_vec())
    })
    .unwrap();
    println!("{r:?}");
    assert!(r.p_value < 1e-6, "{r:?}");
}

#[test]
fn out_of_population_draw_is_reported() {
    let population = sudoku_grids(2).unwrap();
    let bogus = vec![1u8; 16];
    let err = uniformity_test_with(&population, 28_800, |_| Ok(bogus.clone())).unwrap_err();
    assert!(matches!(err, Error::Verification(_)));
}

#[test]
fn populations_beyond_reach_are_refused() {
    assert!(matches!(
        uniformity_test(DesignKind::Sudoku, 3, 1, 0),
        Err(Error::PopulationTooLarge(_))
    ));
}

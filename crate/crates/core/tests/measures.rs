mod common;

use aevo_core::aesthetics::{measure_all, smoothness, symmetry_parts};
use aevo_core::{FeatureId, Image};
use proptest::prelude::*;

fn library(img: &Image) -> [f64; 5] {
    let v = measure_all(img).unwrap();
    std::array::from_fn(|i| v[i].value)
}

#[test]
fn measures_match_brute_force_on_random_images() {
    let mut rng = common::rng(11);
    for _ in 0..100 {
        let img = common::random_image(&mut rng, 16, 16);
        let (got, want) = (library(&img), common::all(&img));
        for (k, f) in FeatureId::ALL.iter().enumerate() {
            assert!((got[k] - want[k]).abs() < 1e-9, "{f}: {} vs {}", got[k], want[k]);
        }
    }
}

#[test]
fn measures_match_brute_force_on_ragged_sizes() {
    let mut rng = common::rng(12);
    for (w, h) in [(2, 2), (3, 7), (17, 11), (26, 51), (130, 9)] {
        let img = common::random_image(&mut rng, w, h);
        let (got, want) = (library(&img), common::all(&img));
        for k in 0..5 {
            assert!((got[k] - want[k]).abs() < 1e-9, "{w}x{h} measure {k}");
        }
    }
}

#[test]
fn checkerboard_smoothness_pin() {
    // 1-pixel squares: closed form (255 − 127√2) / 16384
    let img = common::checkerboard(128, 1);
    let pinned = (255.0 - 127.0 * 2f64.sqrt()) / 16384.0;
    assert!((smoothness(&img).unwrap() - pinned).abs() < 1e-9);
    assert!((common::smoothness(&img) - pinned).abs() < 1e-9);
    // the checkerboard is rotation symmetric, so the forward-only reading agrees
    assert!((common::smoothness_forward_only(&img) - pinned).abs() < 1e-9);
}

#[test]
fn checkerboard_gcf_pin() {
    let img = common::checkerboard(128, 8);
    let pinned = 1.0893384337235381;
    let v = aevo_core::aesthetics::gcf(&img);
    assert!((v - pinned).abs() < 1e-9, "{v}");
    assert!((common::gcf(&img) - pinned).abs() < 1e-9);
}

#[test]
fn forward_only_smoothness_is_not_rotation_invariant() {
    let img = Image::from_fn(2, 2, |r, c| if (r, c) == (0, 0) { [255; 3] } else { [0; 3] }).unwrap();
    let a = common::smoothness_forward_only(&img);
    let b = common::smoothness_forward_only(&img.rotated_180());
    assert!((a - b).abs() > 0.05);
    let lib = smoothness(&img).unwrap();
    assert_eq!(lib, smoothness(&img.rotated_180()).unwrap());
}

fn arb_image() -> impl Strategy<Value = Image> {
    (2usize..20, 2usize..20).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<u8>(), w * h * 3)
            .prop_map(move |data| Image::new(w, h, data).unwrap())
    })
}

proptest! {
    #[test]
    fn bounded_measures_stay_in_unit_interval(img in arb_image()) {
        let v = library(&img);
        for (k, f) in FeatureId::ALL.iter().enumerate() {
            if f.is_bounded() {
                prop_assert!((0.0..=1.0).contains(&v[k]), "{f} = {}", v[k]);
            } else {
                prop_assert!(v[k] >= 0.0);
            }
        }
    }

    #[test]
    fn grayscale_has_zero_saturation(img in arb_image()) {
        prop_assert_eq!(library(&img.to_grayscale())[1], 0.0);
    }

    #[test]
    fn mirror_is_horizontally_symmetric(img in arb_image()) {
        let m = img.mirrored_horizontal();
        let mirrored = Image::from_fn(img.width(), img.height(), |r, c| {
            if c < img.width() / 2 { img.pixel(r, c) } else { img.pixel(r, img.width() - 1 - c) }
        }).unwrap();
        prop_assert_eq!(symmetry_parts(&mirrored).horizontal, 1.0);
        // mirroring twice is the identity
        prop_assert_eq!(m.mirrored_horizontal(), img);
    }

    #[test]
    fn rotation_keeps_pixel_measures(img in arb_image()) {
        let (a, b) = (library(&img), library(&img.rotated_180()));
        for k in 0..4 {
            prop_assert!((a[k] - b[k]).abs() < 1e-12, "measure {} {} vs {}", k, a[k], b[k]);
        }
    }
}

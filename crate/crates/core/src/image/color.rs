/// Hue, saturation and value, each in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HsvTriple {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

/// Hexcone RGB to HSV. Achromatic pixels get hue 0; hue is wrapped into `[0, 1)`.
pub fn rgb_to_hsv(r: f64, g: f64, b: f64) -> HsvTriple {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let v = max;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    if delta <= 0.0 {
        return HsvTriple { h: 0.0, s, v };
    }
    let sector = if max == r {
        (g - b) / delta
    } else if max == g {
        2.0 + (b - r) / delta
    } else {
        4.0 + (r - g) / delta
    };
    let mut h = sector / 6.0;
    if h < 0.0 {
        h += 1.0;
    }
    if h >= 1.0 {
        h -= 1.0;
    }
    HsvTriple { h, s, v }
}

/// Inverse of [`rgb_to_hsv`].
pub fn hsv_to_rgb(hsv: HsvTriple) -> [f64; 3] {
    let HsvTriple { h, s, v } = hsv;
    if s <= 0.0 {
        return [v, v, v];
    }
    let h6 = (h.rem_euclid(1.0)) * 6.0;
    let sector = h6.floor();
    let f = h6 - sector;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    match sector as u32 % 6 {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn reference_colors() {
        let red = rgb_to_hsv(1.0, 0.0, 0.0);
        assert_eq!((red.h, red.s, red.v), (0.0, 1.0, 1.0));

        let gray = rgb_to_hsv(0.5, 0.5, 0.5);
        assert_eq!((gray.h, gray.s, gray.v), (0.0, 0.0, 0.5));

        let green = rgb_to_hsv(0.0, 1.0, 0.0);
        assert!(close(green.h, 1.0 / 3.0));
        assert_eq!((green.s, green.v), (1.0, 1.0));

        let blue = rgb_to_hsv(0.0, 0.0, 1.0);
        assert!(close(blue.h, 2.0 / 3.0));
        let yellow = rgb_to_hsv(1.0, 1.0, 0.0);
        assert!(close(yellow.h, 1.0 / 6.0));
        let magenta = rgb_to_hsv(1.0, 0.0, 1.0);
        assert!(close(magenta.h, 5.0 / 6.0));

        let black = rgb_to_hsv(0.0, 0.0, 0.0);
        assert_eq!((black.h, black.s, black.v), (0.0, 0.0, 0.0));
    }

    proptest! {
        #[test]
        fn roundtrip_within_one_level(r in 0u8..=255, g in 0u8..=255, b in 0u8..=255) {
            let rgb = [f64::from(r) / 255.0, f64::from(g) / 255.0, f64::from(b) / 255.0];
            let hsv = rgb_to_hsv(rgb[0], rgb[1], rgb[2]);
            prop_assert!((0.0..1.0).contains(&hsv.h));
            prop_assert!((0.0..=1.0).contains(&hsv.s));
            prop_assert!((0.0..=1.0).contains(&hsv.v));
            let back = hsv_to_rgb(hsv);
            for c in 0..3 {
                prop_assert!((back[c] - rgb[c]).abs() <= 1.0 / 255.0);
            }
        }
    }
}

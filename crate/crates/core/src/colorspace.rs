//! HSV and double-opponent (DO) color representations.

/// Hue in degrees `[0, 360)`, saturation and value in `[0, 255]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HsvColor {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

/// Point on the red-green / yellow-blue opponent plane, with polar form.
///
/// `theta` is meaningless when `r == 0`; it is reported as 0 there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoColor {
    pub o_rg: f64,
    pub o_yb: f64,
    pub r: f64,
    pub theta: f64,
}

fn wrap_degrees(mut deg: f64) -> f64 {
    if deg < 0.0 {
        deg += 360.0;
    }
    // rounding can land exactly on 360 after the wrap
    if deg >= 360.0 {
        deg -= 360.0;
    }
    deg
}

/// Piecewise hexcone HSV. On ties the red case wins, then green.
/// Saturation is scaled to `[0, 255]`.
pub fn rgb_to_hsv(r: f64, g: f64, b: f64) -> HsvColor {
    let v = r.max(g).max(b);
    let min = r.min(g).min(b);
    let chroma = v - min;
    let h = if chroma == 0.0 {
        0.0
    } else if v == r {
        60.0 * (g - b) / chroma
    } else if v == g {
        120.0 + 60.0 * (b - r) / chroma
    } else {
        240.0 + 60.0 * (r - g) / chroma
    };
    let s = if v == 0.0 { 0.0 } else { 255.0 * chroma / v };
    HsvColor {
        h: wrap_degrees(h),
        s,
        v,
    }
}

/// `O_RG = X_R - X_G`, `O_YB = (X_R + X_G)/2 - X_B` (yellow positive),
/// with `theta` from the quadrant-aware arctangent.
pub fn retinex_to_do(x_r: f64, x_g: f64, x_b: f64) -> DoColor {
    let o_rg = x_r - x_g;
    let o_yb = 0.5 * (x_r + x_g) - x_b;
    let r = o_rg.hypot(o_yb);
    let theta = if r == 0.0 {
        0.0
    } else {
        wrap_degrees(o_yb.atan2(o_rg).to_degrees())
    };
    DoColor {
        o_rg,
        o_yb,
        r,
        theta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hsv_examples() {
        assert_eq!(
            rgb_to_hsv(255.0, 0.0, 0.0),
            HsvColor {
                h: 0.0,
                s: 255.0,
                v: 255.0
            }
        );
        assert_eq!(
            rgb_to_hsv(100.0, 100.0, 100.0),
            HsvColor {
                h: 0.0,
                s: 0.0,
                v: 100.0
            }
        );
        assert_eq!(
            rgb_to_hsv(0.0, 128.0, 128.0),
            HsvColor {
                h: 180.0,
                s: 255.0,
                v: 128.0
            }
        );
        assert_eq!(rgb_to_hsv(0.0, 0.0, 0.0).s, 0.0);
        assert_eq!(rgb_to_hsv(255.0, 0.0, 255.0).h, 300.0);
        assert_eq!(rgb_to_hsv(255.0, 255.0, 0.0).h, 60.0);
    }

    #[test]
    fn negative_red_case_wraps() {
        let hsv = rgb_to_hsv(200.0, 10.0, 60.0);
        assert!((hsv.h - (360.0 - 60.0 * 50.0 / 190.0)).abs() < 1e-12);
    }

    #[test]
    fn do_examples() {
        let grey = retinex_to_do(40.0, 40.0, 40.0);
        assert_eq!(
            (grey.o_rg, grey.o_yb, grey.r, grey.theta),
            (0.0, 0.0, 0.0, 0.0)
        );

        let yellow = retinex_to_do(255.0, 255.0, 0.0);
        assert_eq!((yellow.o_rg, yellow.o_yb, yellow.theta), (0.0, 255.0, 90.0));

        let c = retinex_to_do(200.0, 100.0, 50.0);
        assert_eq!((c.o_rg, c.o_yb), (100.0, 100.0));
        assert!((c.r - 141.421_356_237_309_5).abs() < 1e-9);
        assert!((c.theta - 45.0).abs() < 1e-12);

        assert_eq!(retinex_to_do(0.0, 0.0, 10.0).theta, 270.0);
        assert_eq!(retinex_to_do(-10.0, 10.0, 0.0).theta, 180.0);
    }

    proptest! {
        #[test]
        fn hue_ignores_common_offset(
            r in 0.0f64..200.0, g in 0.0f64..200.0, b in 0.0f64..200.0, k in 0.0f64..55.0,
        ) {
            prop_assume!(!(r == g && g == b));
            let a = rgb_to_hsv(r, g, b).h;
            let s = rgb_to_hsv(r + k, g + k, b + k).h;
            let d = (a - s).abs();
            prop_assert!(d.min(360.0 - d) < 1e-9);
        }

        #[test]
        fn hsv_ranges(r in 0.0f64..=255.0, g in 0.0f64..=255.0, b in 0.0f64..=255.0) {
            let c = rgb_to_hsv(r, g, b);
            prop_assert!((0.0..360.0).contains(&c.h));
            prop_assert!((0.0..=255.0).contains(&c.s));
            prop_assert!((0.0..=255.0).contains(&c.v));
        }

        #[test]
        fn do_scaling_and_polar_round_trip(
            x in -255.0f64..255.0, y in -255.0f64..255.0, z in -255.0f64..255.0, a in 0.01f64..10.0,
        ) {
            let c = retinex_to_do(x, y, z);
            let s = retinex_to_do(a * x, a * y, a * z);
            prop_assert!((s.r - a * c.r).abs() <= 1e-9 * (1.0 + a * c.r));
            if c.r > 1e-6 {
                let d = (s.theta - c.theta).abs();
                prop_assert!(d.min(360.0 - d) < 1e-9);
            }
            let t = c.theta.to_radians();
            prop_assert!((c.r * t.cos() - c.o_rg).abs() < 1e-9);
            prop_assert!((c.r * t.sin() - c.o_yb).abs() < 1e-9);
            prop_assert!((0.0..360.0).contains(&c.theta));
        }
    }
}

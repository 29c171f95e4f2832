use rug::Float;

use lavrik_core::xray::{extract_curves, sign_grid, CurveKind, XRayCurve, XrayFunction};
use lavrik_core::zeros::Rect;
use lavrik_core::PrecisionContext;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(128).unwrap()
}

/// Curve edges of each kind crossing the horizontal segment at height y
/// between x0 and x1.
fn crossings(curves: &[XRayCurve], y: f64, x0: f64, x1: f64) -> (usize, usize) {
    let mut n = (0, 0);
    for c in curves {
        let pts: Vec<(f64, f64)> = c.points.iter().map(|p| (p.real().to_f64(), p.imag().to_f64())).collect();
        let mut edges: Vec<((f64, f64), (f64, f64))> = pts.windows(2).map(|w| (w[0], w[1])).collect();
        if c.closed && pts.len() > 2 {
            edges.push((pts[pts.len() - 1], pts[0]));
        }
        for (a, b) in edges {
            if (a.1 - y) * (b.1 - y) < 0.0 {
                let x = a.0 + (b.0 - a.0) * (y - a.1) / (b.1 - a.1);
                if x > x0 && x < x1 {
                    match c.kind {
                        CurveKind::Real => n.0 += 1,
                        CurveKind::Imaginary => n.1 += 1,
                    }
                }
            }
        }
    }
    n
}

#[test]
fn refined_vertices_lie_on_their_level_set() {
    let c = ctx();
    let grid = sign_grid(XrayFunction::Lambda, Rect([-4.0, 12.0, -2.5, 22.0]), 17, 25, &c).unwrap();
    let curves = extract_curves(&grid, true, &c).unwrap();
    let kinds: Vec<CurveKind> = curves.iter().map(|k| k.kind).collect();
    assert!(kinds.contains(&CurveKind::Real) && kinds.contains(&CurveKind::Imaginary), "{kinds:?}");
    let mut checked = 0;
    for curve in &curves {
        assert!(curve.refined);
        for p in &curve.points {
            let prec = p.prec().0;
            let v = XrayFunction::Lambda.eval(p, prec).unwrap();
            let off = match curve.kind {
                CurveKind::Real => Float::with_val(64, v.imag().abs_ref()),
                CurveKind::Imaginary => Float::with_val(64, v.real().abs_ref()),
            };
            let bound = (Float::with_val(64, v.abs_ref()) + 1e-30) * 1e-8;
            assert!(off < bound, "{:?} vertex {} + {}i", curve.kind, p.real().to_f64(), p.imag().to_f64());
            checked += 1;
        }
    }
    assert!(checked > 20);
}

#[test]
fn doubling_the_grid_keeps_the_crossing_counts() {
    let c = ctx();
    let cases = [
        (XrayFunction::Lambda, Rect([-10.0, 30.0, -20.0, 40.0]), 41, 61, 10.3),
        (XrayFunction::L, Rect([-10.0, 30.0, -20.0, 40.0]), 41, 61, 10.3),
        (XrayFunction::SLambda, Rect([-2.0, 200.0, -2.0, 200.0]), 101, 101, 20.3),
    ];
    for (f, region, nx, ny, y) in cases {
        let [x0, x1, _, _] = region.0;
        let count = |nx: usize, ny: usize| {
            let g = sign_grid(f, region, nx, ny, &c).unwrap();
            crossings(&extract_curves(&g, false, &c).unwrap(), y, x0, x1)
        };
        let coarse = count(nx, ny);
        let fine = count(2 * nx - 1, 2 * ny - 1);
        assert_eq!(coarse, fine, "{} on {:?}", f.name(), region.0);
        assert!(coarse.0 + coarse.1 > 0);
    }
}

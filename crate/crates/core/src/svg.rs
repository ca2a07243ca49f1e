//! Deterministic SVG drawings of domains, decompositions, curves and porosity verdicts.

use std::fmt::Write as _;

use crate::curve::GeodesicResult;
use crate::domain::Domain;
use crate::dyadic::WhitneyDecomposition;
use crate::geom::{Point, Rect};
use crate::porosity::PorosityProfile;
use crate::real::Real;

/// What to draw.
pub enum Artifact<'a, T> {
    Domain(&'a Domain<T>),
    Decomposition {
        decomposition: &'a WhitneyDecomposition<T>,
        domain: Option<&'a Domain<T>>,
    },
    Geodesic {
        domain: &'a Domain<T>,
        result: &'a GeodesicResult<T>,
    },
    /// Boundary points coloured by verdict.
    Porosity {
        domain: &'a Domain<T>,
        profiles: &'a [PorosityProfile],
    },
    /// A domain with extra polylines, such as John curves.
    Curves {
        domain: &'a Domain<T>,
        curves: &'a [Vec<Point<T>>],
    },
}

const SIZE: f64 = 800.0;

struct Canvas {
    body: String,
    view: Rect<f64>,
    scale: f64,
}

impl Canvas {
    fn new(view: Rect<f64>) -> Self {
        let scale = SIZE / view.width().max(view.height()).max(f64::MIN_POSITIVE);
        Canvas { body: String::new(), view, scale }
    }

    fn map(&self, p: Point<f64>) -> (f64, f64) {
        ((p.x - self.view.min.x) * self.scale, (self.view.max.y - p.y) * self.scale)
    }

    fn polyline(&mut self, pts: &[Point<f64>], closed: bool, class: &str) {
        let tag = if closed { "polygon" } else { "polyline" };
        let _ = write!(self.body, "<{tag} class=\"{class}\" points=\"");
        for (i, &p) in pts.iter().enumerate() {
            let (x, y) = self.map(p);
            let sep = if i == 0 { "" } else { " " };
            let _ = write!(self.body, "{sep}{x:.3},{y:.3}");
        }
        self.body.push_str("\"/>\n");
    }

    fn rect(&mut self, r: &Rect<f64>, class: &str) {
        let (x, y) = self.map(Point::new(r.min.x, r.max.y));
        let _ = writeln!(
            self.body,
            "<rect class=\"{class}\" x=\"{x:.3}\" y=\"{y:.3}\" width=\"{:.3}\" height=\"{:.3}\"/>",
            r.width() * self.scale,
            r.height() * self.scale
        );
    }

    fn dot(&mut self, p: Point<f64>, class: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(self.body, "<circle class=\"{class}\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\"/>");
    }

    fn finish(self) -> String {
        let w = self.view.width() * self.scale;
        let h = self.view.height() * self.scale;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.3} {h:.3}\">\n\
             <style>.domain{{fill:#eef;stroke:#226;stroke-width:1}} .cell{{fill:none;stroke:#888;stroke-width:0.5}} \
             .curve{{fill:none;stroke:#c22;stroke-width:1.5}} .pass{{fill:#2a2}} .fail{{fill:#c22}}</style>\n{}</svg>\n",
            self.body
        )
    }
}

fn to64<T: Real>(pts: &[Point<T>]) -> Vec<Point<f64>> {
    pts.iter().map(|p| p.cast()).collect()
}

fn domain_view<T: Real>(d: &Domain<T>) -> Rect<f64> {
    let b = d.bbox();
    let b: Rect<f64> = Rect::new(b.min.cast(), b.max.cast());
    b.expand(b.width().max(b.height()) * 0.05)
}

pub fn render_svg<T: Real>(artifact: &Artifact<'_, T>) -> String {
    match artifact {
        Artifact::Domain(d) => {
            let mut c = Canvas::new(domain_view(*d));
            c.polyline(&to64(d.vertices()), true, "domain");
            c.finish()
        }
        Artifact::Decomposition { decomposition: w, domain } => {
            let rects: Vec<Rect<f64>> = w
                .cells
                .iter()
                .map(|q| {
                    let r = w.rect(q);
                    Rect::new(r.min.cast(), r.max.cast())
                })
                .collect();
            let mut view = domain.map(|d| domain_view(d));
            for r in &rects {
                view = Some(view.map_or(*r, |v| v.union(r)));
            }
            let mut c = Canvas::new(view.unwrap_or(Rect::from_coords(0.0, 0.0, 1.0, 1.0)));
            if let Some(d) = domain {
                c.polyline(&to64(d.vertices()), true, "domain");
            }
            for r in &rects {
                c.rect(r, "cell");
            }
            c.finish()
        }
        Artifact::Geodesic { domain, result } => {
            let mut view = domain_view(*domain);
            if let Some(b) = Rect::bounding(to64(&result.polyline)) {
                view = view.union(&b.expand(b.width().max(b.height()) * 0.05));
            }
            let mut c = Canvas::new(view);
            c.polyline(&to64(domain.vertices()), true, "domain");
            c.polyline(&to64(&result.polyline), false, "curve");
            c.finish()
        }
        Artifact::Porosity { domain, profiles } => {
            let mut c = Canvas::new(domain_view(*domain));
            c.polyline(&to64(domain.vertices()), true, "domain");
            for p in profiles.iter() {
                c.dot(Point::new(p.x[0], p.x[1]), if p.verdict { "pass" } else { "fail" });
            }
            c.finish()
        }
        Artifact::Curves { domain, curves } => {
            let mut c = Canvas::new(domain_view(*domain));
            c.polyline(&to64(domain.vertices()), true, "domain");
            for curve in curves.iter() {
                c.polyline(&to64(curve), false, "curve");
            }
            c.finish()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_unit_square;
    use crate::dyadic::whitney_of_square;

    #[test]
    fn square_decomposition_draws_every_cell() {
        let w = whitney_of_square::<f64>(4);
        let s = render_svg(&Artifact::Decomposition { decomposition: &w, domain: None });
        assert_eq!(s.matches("<rect ").count(), 4 + 20 + 52);
        assert!(s.starts_with("<svg"));
    }

    #[test]
    fn curves_are_drawn_and_output_is_stable() {
        let d = build_unit_square::<f64>();
        let curves = vec![vec![Point::new(0.1, 0.1), Point::new(0.5, 0.5)]];
        let a = render_svg(&Artifact::Curves { domain: &d, curves: &curves });
        let b = render_svg(&Artifact::Curves { domain: &d, curves: &curves });
        assert!(a.contains("<polyline class=\"curve\""));
        assert_eq!(a, b);
    }
}

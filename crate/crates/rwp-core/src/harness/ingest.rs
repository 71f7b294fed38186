//! Real-deployment ingestion: CSV of `x,y` site coordinates, normalized to
//! the unit square.

use super::HarnessError;
use crate::geom::{Point, Rect};
use crate::voronoi::{default_guard_margin, PointField};
use std::path::Path;

/// A normalized deployment: the site field on the unit square, the implied
/// intensity, and the matched hexagon side.
#[derive(Clone, Debug)]
pub struct Deployment {
    pub field: PointField,
    /// Sites per unit area after normalization; equals the site count.
    pub mu: f64,
    /// Hexagon side with the matching mean cell area `3√3 d²/2 = 1/μ`.
    pub hex_side: f64,
}

/// Reads a CSV of `x,y` rows (an optional literal `x,y` header is skipped),
/// rescales the bounding box anisotropically onto `[0,1]²`, and derives the
/// matched intensities. The observation window shrinks by the guard margin
/// so queries stay clear of the truncated outer cells.
pub fn ingest_deployment(path: &Path) -> Result<Deployment, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    let mut points = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 && line.eq_ignore_ascii_case("x,y") {
            continue;
        }
        let mut parts = line.split(',');
        let parse = |s: Option<&str>| s.and_then(|v| v.trim().parse::<f64>().ok());
        match (parse(parts.next()), parse(parts.next()), parts.next()) {
            (Some(x), Some(y), None) if x.is_finite() && y.is_finite() => {
                points.push(Point::new(x, y))
            }
            _ => {
                return Err(HarnessError::ParseRow {
                    line: lineno + 1,
                    content: raw.to_string(),
                })
            }
        }
    }
    if points.len() < 2 {
        return Err(HarnessError::TooFewRows(points.len()));
    }

    let mut lo = points[0];
    let mut hi = points[0];
    for p in &points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    let (w, h) = (hi.x - lo.x, hi.y - lo.y);
    if w <= 0.0 || h <= 0.0 {
        return Err(HarnessError::DegenerateBoundingBox);
    }
    for p in points.iter_mut() {
        p.x = (p.x - lo.x) / w;
        p.y = (p.y - lo.y) / h;
    }

    let mu = points.len() as f64;
    let hex_side = (2.0 / (3.0 * 3f64.sqrt() * mu)).sqrt();
    let field = PointField::new(
        points,
        Rect::new(0.0, 0.0, 1.0, 1.0),
        default_guard_margin(mu),
    )?
    .with_index();
    Ok(Deployment {
        field,
        mu,
        hex_side,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RandomStream;
    use std::io::Write;

    fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir().join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    #[test]
    fn synthetic_400_sites_derive_expected_intensities() {
        let mut stream = RandomStream::new(70, 0);
        let mut text = String::new();
        for _ in 0..400 {
            text.push_str(&format!(
                "{},{}\n",
                stream.next_range(0.0, 105.0),
                stream.next_range(0.0, 90.0)
            ));
        }
        let path = write_temp("deploy400.csv", &text);
        let dep = ingest_deployment(&path).unwrap();
        assert_eq!(dep.mu, 400.0);
        // Algebra oracle: 3 sqrt3 d^2 / 2 = 1/400.
        let want = (2.0 / (3.0 * 3f64.sqrt() * 400.0)).sqrt();
        assert!((dep.hex_side - want).abs() < 1e-15);
        assert!((dep.hex_side - 0.031020161970070).abs() < 1e-12);
        for p in dep.field.points() {
            assert!((0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y));
        }
    }

    #[test]
    fn ingestion_is_idempotent_on_normalized_data() {
        let mut stream = RandomStream::new(71, 0);
        let mut pts = vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0)];
        for _ in 0..60 {
            pts.push(Point::new(stream.next_f64(), stream.next_f64()));
        }
        let text: String = pts.iter().map(|p| format!("{},{}\n", p.x, p.y)).collect();
        let path = write_temp("deploy_norm.csv", &text);
        let dep = ingest_deployment(&path).unwrap();
        for (orig, got) in pts.iter().zip(dep.field.points()) {
            assert!((orig.x - got.x).abs() <= 1e-12);
            assert!((orig.y - got.y).abs() <= 1e-12);
        }
    }

    #[test]
    fn collinear_points_rejected() {
        let path = write_temp("deploy_line.csv", "0,1\n2,1\n5,1\n");
        assert!(matches!(
            ingest_deployment(&path),
            Err(HarnessError::DegenerateBoundingBox)
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let path = write_temp("deploy_bad.csv", "1,2\nnot-a-row\n3,4\n");
        match ingest_deployment(&path) {
            Err(HarnessError::ParseRow { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn too_few_rows_rejected() {
        let path = write_temp("deploy_one.csv", "1,2\n");
        assert!(matches!(
            ingest_deployment(&path),
            Err(HarnessError::TooFewRows(1))
        ));
    }

    #[test]
    fn header_row_is_skipped() {
        let path = write_temp("deploy_hdr.csv", "x,y\n0,0\n1,2\n2,1\n");
        let dep = ingest_deployment(&path).unwrap();
        assert_eq!(dep.field.len(), 3);
    }
}

use std::io::{Read, Write};

use crate::error::{Error, Result};

/// One sample's raw (wavenumber cm⁻¹, intensity) points.
///
/// Non-empty, wavenumbers strictly increasing, all values finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    points: Vec<(f64, f64)>,
}

impl Spectrum {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("spectrum has no points"));
        }
        for (i, &(x, y)) in points.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::invalid(format!("non-finite value at point {i}")));
            }
            if i > 0 && points[i - 1].0 >= x {
                return Err(Error::invalid(format!(
                    "wavenumbers not strictly increasing at point {i}"
                )));
            }
        }
        Ok(Spectrum { points })
    }

    /// Dense spectrum on the integer grid `start, start + 1, …`.
    pub fn from_grid(start: i64, values: &[f64]) -> Result<Self> {
        Spectrum::new(
            values
                .iter()
                .enumerate()
                .map(|(i, &y)| ((start + i as i64) as f64, y))
                .collect(),
        )
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    /// Same wavenumber grid, new intensities.
    pub fn with_intensities(&self, ys: &[f64]) -> Result<Self> {
        if ys.len() != self.points.len() {
            return Err(Error::invalid(format!(
                "intensity count {} does not match grid length {}",
                ys.len(),
                self.points.len()
            )));
        }
        Spectrum::new(self.points.iter().zip(ys).map(|(p, &y)| (p.0, y)).collect())
    }

    /// First `n` points.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.points.len() {
            return Err(Error::invalid(format!(
                "cannot truncate spectrum of {} points to {n}",
                self.points.len()
            )));
        }
        Ok(Spectrum {
            points: self.points[..n].to_vec(),
        })
    }
}

fn parse_cell(cell: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = cell.trim().parse().map_err(|_| Error::Format {
        line,
        message: format!("non-numeric {what} `{}`", cell.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::Format {
            line,
            message: format!("non-finite {what} `{}`", cell.trim()),
        });
    }
    Ok(v)
}

/// Parse a two-column `wavenumber,intensity` CSV.
///
/// A single header line is skipped when the first row's wavenumber cell is
/// not numeric. Extra columns are ignored. Output is sorted by wavenumber; for
/// duplicate wavenumbers the last occurrence in the file wins.
pub fn parse_spectrum_csv<R: Read>(reader: R) -> Result<Spectrum> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut points = Vec::new();
    let mut last_line = 0;
    let mut seen_row = false;
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Format {
            line: e.position().map(|p| p.line() as usize).unwrap_or(row + 1),
            message: e.to_string(),
        })?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(row + 1);
        last_line = line;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        if record.len() < 2 {
            return Err(Error::Format {
                line,
                message: format!("expected 2 columns, found {}", record.len()),
            });
        }
        // Header: the first non-empty row, when its wavenumber cell is not a number.
        if !seen_row && record[0].trim().parse::<f64>().is_err() {
            seen_row = true;
            continue;
        }
        seen_row = true;
        let x = parse_cell(&record[0], line, "wavenumber")?;
        let y = parse_cell(&record[1], line, "intensity")?;
        points.push((x, y));
    }

    if points.is_empty() {
        return Err(Error::Format {
            line: last_line.max(1),
            message: "empty file".into(),
        });
    }
    if points.len() < 2 {
        return Err(Error::Format {
            line: last_line,
            message: "fewer than 2 points".into(),
        });
    }

    // Stable sort keeps file order among equal wavenumbers, so the last one is the later line.
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut deduped: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for p in points {
        match deduped.last_mut() {
            Some(last) if last.0 == p.0 => *last = p,
            _ => deduped.push(p),
        }
    }
    Spectrum::new(deduped)
}

/// Write `wavenumber,intensity` CSV with a header. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_spectrum_csv<W: Write>(spectrum: &Spectrum, mut writer: W) -> std::io::Result<()> {
    writeln!(writer, "wavenumber,intensity")?;
    for (x, y) in spectrum.points() {
        writeln!(writer, "{x},{y}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(s: &str) -> Result<Spectrum> {
        parse_spectrum_csv(s.as_bytes())
    }

    #[test]
    fn direct_parse() {
        let s = parse("100,5.0\n101,6.0").unwrap();
        assert_eq!(s.points(), &[(100.0, 5.0), (101.0, 6.0)]);
    }

    #[test]
    fn header_skip_and_sort() {
        let s = parse("x,y\n300,1.5\n200,2.5").unwrap();
        assert_eq!(s.points(), &[(200.0, 2.5), (300.0, 1.5)]);
    }

    #[test]
    fn non_numeric_cell_names_line() {
        match parse("100,abc") {
            Err(Error::Format { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected format error, got {other:?}"),
        }
        match parse("x,y\n1,2\n3,oops\n") {
            Err(Error::Format { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn empty_and_short_files() {
        assert!(matches!(parse(""), Err(Error::Format { .. })));
        assert!(matches!(parse("x,y\n"), Err(Error::Format { .. })));
        assert!(matches!(parse("1,2\n"), Err(Error::Format { line: 1, .. })));
        assert!(matches!(parse("1,nan\n2,3"), Err(Error::Format { line: 1, .. })));
    }

    #[test]
    fn duplicates_keep_last() {
        let s = parse("5,1\n3,9\n5,2\n").unwrap();
        assert_eq!(s.points(), &[(3.0, 9.0), (5.0, 2.0)]);
    }

    #[test]
    fn spectrum_invariants_enforced() {
        assert!(Spectrum::new(vec![]).is_err());
        assert!(Spectrum::new(vec![(1.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(Spectrum::new(vec![(2.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(Spectrum::new(vec![(1.0, f64::INFINITY)]).is_err());
    }

    proptest! {
        #[test]
        fn parse_write_parse_is_bit_identical(
            raw in prop::collection::vec((-1e6f64..1e6, -1e9f64..1e9), 2..60)
        ) {
            let mut points = raw;
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            points.dedup_by(|a, b| a.0 == b.0);
            prop_assume!(points.len() >= 2);
            let s = Spectrum::new(points).unwrap();
            let mut buf = Vec::new();
            write_spectrum_csv(&s, &mut buf).unwrap();
            let back = parse_spectrum_csv(buf.as_slice()).unwrap();
            let bits = |s: &Spectrum| s.points().iter().map(|p| (p.0.to_bits(), p.1.to_bits())).collect::<Vec<_>>();
            prop_assert_eq!(bits(&s), bits(&back));
        }
    }
}

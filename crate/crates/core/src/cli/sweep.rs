//! Parameter sweeps over the two generator families, written as CSV.

use std::io::Write;

use super::fmt_g12;
use crate::discrimination::{classify, NonlocalityLabel};
use crate::error::Result;
use crate::ueb::{self, generate_eq1, generate_eq2, GeneratorParams};
use crate::verify::LambdaGrid;

pub const HEADER: [&str; 6] = [
    "λ1",
    "λ3",
    "class",
    "unidentifiable",
    "avg_entanglement",
    "is_ueb",
];

pub const JOINED_HEADER: [&str; 8] = [
    "λ1",
    "λ3",
    "eq1_class",
    "eq2_class",
    "eq1_avg_entanglement",
    "eq2_avg_entanglement",
    "eq2_higher_class",
    "eq2_less_entangled",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Eq1,
    Eq2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub lambda1: f64,
    /// Absent for the second family.
    pub lambda3: Option<f64>,
    pub class: NonlocalityLabel,
    pub unidentifiable: Vec<usize>,
    pub avg_entanglement: f64,
    pub is_ueb: bool,
}

/// One record per grid point, `lambda1` outermost.
pub fn sweep(family: Family, grid: &LambdaGrid) -> Result<Vec<SweepRecord>> {
    let values = grid.values();
    let points: Vec<(f64, Option<f64>)> = match family {
        Family::Eq1 => values
            .iter()
            .flat_map(|&l1| values.iter().map(move |&l3| (l1, Some(l3))))
            .collect(),
        Family::Eq2 => values.iter().map(|&l1| (l1, None)).collect(),
    };
    points
        .into_iter()
        .map(|(lambda1, lambda3)| {
            let set = match lambda3 {
                Some(l3) => generate_eq1(GeneratorParams::new(lambda1, l3)?),
                None => generate_eq2(lambda1)?,
            };
            let (class, report) = classify(&set)?;
            Ok(SweepRecord {
                lambda1,
                lambda3,
                class: class.label,
                unidentifiable: report.unidentifiable(),
                avg_entanglement: set.average_entanglement(),
                is_ueb: ueb::ueb_check(&set)?.is_ueb,
            })
        })
        .collect()
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> std::io::Result<()> {
    let mut w = writer(out);
    w.write_record(HEADER)?;
    for r in records {
        let unidentifiable = r
            .unidentifiable
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            fmt_g12(r.lambda1),
            r.lambda3.map(fmt_g12).unwrap_or_default(),
            r.class.to_string(),
            unidentifiable,
            fmt_g12(r.avg_entanglement),
            r.is_ueb.to_string(),
        ])?;
    }
    w.flush()
}

/// `Some(label)` when every record has the same class.
pub fn uniform_class(records: &[SweepRecord]) -> Option<NonlocalityLabel> {
    let first = records.first()?.class;
    records.iter().all(|r| r.class == first).then_some(first)
}

#[derive(Clone, Debug, PartialEq)]
pub struct JoinedRecord {
    pub lambda1: f64,
    pub lambda3: f64,
    pub eq1_class: NonlocalityLabel,
    pub eq2_class: NonlocalityLabel,
    pub eq1_avg_entanglement: f64,
    pub eq2_avg_entanglement: f64,
}

impl JoinedRecord {
    pub fn eq2_higher_class(&self) -> bool {
        self.eq2_class > self.eq1_class
    }

    pub fn eq2_less_entangled(&self) -> bool {
        self.eq2_avg_entanglement < self.eq1_avg_entanglement
    }
}

/// Pairs every first-family record with the second-family record of equal
/// `lambda1`.
pub fn join(eq1: &[SweepRecord], eq2: &[SweepRecord]) -> Vec<JoinedRecord> {
    eq1.iter()
        .filter_map(|a| {
            let b = eq2.iter().find(|b| b.lambda1 == a.lambda1)?;
            Some(JoinedRecord {
                lambda1: a.lambda1,
                lambda3: a.lambda3?,
                eq1_class: a.class,
                eq2_class: b.class,
                eq1_avg_entanglement: a.avg_entanglement,
                eq2_avg_entanglement: b.avg_entanglement,
            })
        })
        .collect()
}

pub fn write_joined_csv<W: Write>(records: &[JoinedRecord], out: W) -> std::io::Result<()> {
    let mut w = writer(out);
    w.write_record(JOINED_HEADER)?;
    for r in records {
        w.write_record([
            fmt_g12(r.lambda1),
            fmt_g12(r.lambda3),
            r.eq1_class.to_string(),
            r.eq2_class.to_string(),
            fmt_g12(r.eq1_avg_entanglement),
            fmt_g12(r.eq2_avg_entanglement),
            r.eq2_higher_class().to_string(),
            r.eq2_less_entangled().to_string(),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eq1_five_by_five() {
        let grid = LambdaGrid::new(0.1, 0.9, 5).unwrap();
        let records = sweep(Family::Eq1, &grid).unwrap();
        assert_eq!(records.len(), 25);
        assert_eq!(
            uniform_class(&records),
            Some(NonlocalityLabel::OneUnidentifiable)
        );
        assert!(records.iter().all(|r| r.unidentifiable == [0] && r.is_ueb));
        // row-major
        assert_eq!(
            (records[1].lambda1, records[1].lambda3),
            (0.1, Some(0.30000000000000004))
        );
    }

    #[test]
    fn eq2_five_points() {
        let grid = LambdaGrid::new(0.1, 0.9, 5).unwrap();
        let records = sweep(Family::Eq2, &grid).unwrap();
        assert_eq!(records.len(), 5);
        assert_eq!(
            uniform_class(&records),
            Some(NonlocalityLabel::TwoUnidentifiable)
        );
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("λ1,λ3,class,unidentifiable,avg_entanglement,is_ueb")
        );
        assert!(lines
            .next()
            .unwrap()
            .starts_with("0.1,,TwoUnidentifiable,1;2,"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn joined_rows_match_on_lambda1() {
        let grid = LambdaGrid::new(0.2, 0.8, 3).unwrap();
        let j = join(
            &sweep(Family::Eq1, &grid).unwrap(),
            &sweep(Family::Eq2, &grid).unwrap(),
        );
        assert_eq!(j.len(), 9);
        assert!(j.iter().all(JoinedRecord::eq2_higher_class));
        // average entropy of the second family exceeds the first at every point
        assert!(j.iter().all(|r| !r.eq2_less_entangled()));
    }
}

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::density::FixationRecord;
use crate::error::{Error, Result};

pub const FIXATION_HEADER: [&str; 5] = ["video_id", "subject_id", "timestamp_s", "x_px", "y_px"];

/// Fixations grouped by video id, in file order within each video.
pub type FixationsByVideo = BTreeMap<String, Vec<FixationRecord>>;

pub fn parse_fixation_csv(path: &Path) -> Result<FixationsByVideo> {
    read_fixation_csv(File::open(path)?)
}

pub fn read_fixation_csv<R: Read>(reader: R) -> Result<FixationsByVideo> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(Ok(h)) => h,
        _ => return Err(Error::MissingHeader(FIXATION_HEADER.join(","))),
    };
    if header.iter().ne(FIXATION_HEADER.iter().copied()) {
        return Err(Error::MissingHeader(FIXATION_HEADER.join(",")));
    }

    let mut out = FixationsByVideo::new();
    for rec in records {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |message: String| Error::Parse { line, message };
        if rec.len() != FIXATION_HEADER.len() {
            return Err(bad(format!("expected 5 fields, got {}", rec.len())));
        }
        let num = |i: usize| -> Result<f64> {
            let field = &rec[i];
            let v: f64 = field
                .parse()
                .map_err(|_| bad(format!("{}: `{field}` is not a number", FIXATION_HEADER[i])))?;
            if !v.is_finite() || v < 0.0 {
                return Err(bad(format!(
                    "{} must be finite and >= 0, got {v}",
                    FIXATION_HEADER[i]
                )));
            }
            Ok(v)
        };
        let (t, x, y) = (num(2)?, num(3)?, num(4)?);
        if rec[0].is_empty() {
            return Err(bad("empty video_id".into()));
        }
        out.entry(rec[0].to_string())
            .or_default()
            .push(FixationRecord::new(&rec[1], t, x, y));
    }
    Ok(out)
}

pub fn write_fixation_csv(path: &Path, fixations: &FixationsByVideo) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    wtr.write_record(FIXATION_HEADER).map_err(csv_err)?;
    for (video, recs) in fixations {
        for f in recs {
            wtr.write_record([
                video.as_str(),
                f.subject_id.as_str(),
                &f.t.to_string(),
                &f.x.to_string(),
                &f.y.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_groups() {
        let text = "video_id,subject_id,timestamp_s,x_px,y_px\nv1,s1,0.0,3,4\nv2,s1,0.5,1.5,2\nv1,s2,0.1,7,8\n";
        let out = read_fixation_csv(text.as_bytes()).unwrap();
        assert_eq!(out.values().map(Vec::len).sum::<usize>(), 3);
        assert_eq!(out["v1"].len(), 2);
        assert_eq!(out["v1"][1], FixationRecord::new("s2", 0.1, 7.0, 8.0));
    }

    #[test]
    fn negative_coordinate_reports_line() {
        let text = "video_id,subject_id,timestamp_s,x_px,y_px\nv1,s1,0.0,3,4\nv1,s1,0.1,-1,4\n";
        match read_fixation_csv(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn header_only_is_empty() {
        let text = "video_id,subject_id,timestamp_s,x_px,y_px\n";
        assert!(read_fixation_csv(text.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn header_required() {
        assert!(matches!(
            read_fixation_csv("".as_bytes()),
            Err(Error::MissingHeader(_))
        ));
        assert!(matches!(
            read_fixation_csv("v1,s1,0.0,3,4\n".as_bytes()),
            Err(Error::MissingHeader(_))
        ));
    }

    #[test]
    fn short_row_rejected() {
        let text = "video_id,subject_id,timestamp_s,x_px,y_px\nv1,s1,0.0,3\n";
        assert!(matches!(
            read_fixation_csv(text.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}

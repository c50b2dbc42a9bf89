//! RDS sample CSV: `id,recruiter_id,degree,infected,wave,cross_alters`.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::netcore::io::{check_header, parse_field};

use super::sample::{RdsRecord, RdsSample};

const HEADER: [&str; 6] = ["id", "recruiter_id", "degree", "infected", "wave", "cross_alters"];

fn optional<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, name: &str) -> Result<Option<T>> {
    match rec.get(idx).map(str::trim) {
        None | Some("") => Ok(None),
        Some(_) => parse_field(rec, idx, name).map(Some),
    }
}

pub fn read_sample_from<R: Read>(input: R) -> Result<RdsSample> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &HEADER)?;
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let z: u8 = parse_field(&rec, 3, "infected")?;
        if z > 1 {
            return Err(Error::Format(format!("infected must be 0 or 1, got {z}")));
        }
        records.push(RdsRecord {
            id: parse_field(&rec, 0, "id")?,
            recruiter: optional(&rec, 1, "recruiter_id")?,
            degree: parse_field(&rec, 2, "degree")?,
            infected: z == 1,
            wave: parse_field(&rec, 4, "wave")?,
            cross_alters: optional(&rec, 5, "cross_alters")?,
        });
    }
    RdsSample::from_records(records)
}

pub fn write_sample_to<W: Write>(sample: &RdsSample, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in &sample.records {
        w.write_record([
            r.id.to_string(),
            r.recruiter.map(|p| p.to_string()).unwrap_or_default(),
            r.degree.to_string(),
            u8::from(r.infected).to_string(),
            r.wave.to_string(),
            r.cross_alters.map(|x| x.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sample(path: &Path) -> Result<RdsSample> {
    read_sample_from(std::fs::File::open(path)?)
}

pub fn write_sample(sample: &RdsSample, path: &Path) -> Result<()> {
    write_sample_to(sample, std::io::BufWriter::new(std::fs::File::create(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_blank_fields() {
        let text = "id,recruiter_id,degree,infected,wave,cross_alters\n\
                    10,,3,1,0,2\n\
                    4,10,2,0,1,\n";
        let s = read_sample_from(text.as_bytes()).unwrap();
        assert_eq!(s.seed_ids, vec![10]);
        assert_eq!(s.records[1].recruiter, Some(10));
        assert_eq!(s.records[1].cross_alters, None);
        let mut buf = Vec::new();
        write_sample_to(&s, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text.replace("\\\n", ""));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(read_sample_from("id,degree\n1,2\n".as_bytes()).is_err());
        let bad_wave = "id,recruiter_id,degree,infected,wave,cross_alters\n1,,2,1,0,\n2,1,2,1,2,\n";
        assert!(read_sample_from(bad_wave.as_bytes()).is_err());
        let bad_z = "id,recruiter_id,degree,infected,wave,cross_alters\n1,,2,3,0,\n";
        assert!(read_sample_from(bad_z.as_bytes()).is_err());
    }
}

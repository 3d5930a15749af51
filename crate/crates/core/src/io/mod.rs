//! File formats: fixation CSV, JSON video manifests, map files and reports.

mod fixations;
mod manifest;
mod mapfile;
mod report;

pub use fixations::{
    parse_fixation_csv, read_fixation_csv, write_fixation_csv, FixationsByVideo, FIXATION_HEADER,
};
pub use manifest::{load_frames, load_manifest, write_manifest, ManifestFile, VideoManifest};
pub use mapfile::{
    decode_pfm, decode_pgm8, encode_pfm, encode_pgm8, frame_file_name, read_map, read_sequence,
    sequence_paths, write_map, write_sequence, MapFormat,
};
pub use report::{report_to_csv, report_to_json, write_report, ReportFormat, REPORT_CSV_HEADER};

//! File formats: WAV audio, JSON patches, CSV reports.

pub mod csv;
pub mod patch;
pub mod wav;

pub use csv::{format_number, spectrum_csv, write_csv, CsvRow};
pub use patch::{parse_patch, parse_patch_with_warnings, serialize_patch};
pub use wav::{read_wav, read_wav_file, write_wav, write_wav_file, BitDepth, WavFormat};

//! On-disk memo of Ext results. Purely an optimization: unreadable or
//! corrupt entries are treated as misses and recomputed.

use std::fs;
use std::path::PathBuf;

use blockext_core::ring::OModuleClass;
use sha2::{Digest, Sha256};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone)]
pub struct ExtCache {
    dir: PathBuf,
    /// canonical spec text, hashed into every key
    spec: String,
}

impl ExtCache {
    pub fn new(dir: PathBuf, spec: String) -> std::io::Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(ExtCache { dir, spec })
    }

    fn path(&self, c1: usize, c2: usize, degree: u32, precision: Option<u32>, mode: &str) -> PathBuf {
        let mut h = Sha256::new();
        h.update(format!("blockext {ENGINE_VERSION}\n{}\n", self.spec));
        h.update(format!("{c1} {c2} {degree} {precision:?} {mode}"));
        self.dir.join(format!("{:x}.json", h.finalize()))
    }

    pub fn get(&self, c1: usize, c2: usize, degree: u32, precision: Option<u32>, mode: &str) -> Option<OModuleClass> {
        let text = fs::read_to_string(self.path(c1, c2, degree, precision, mode)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, c1: usize, c2: usize, degree: u32, precision: Option<u32>, mode: &str, class: &OModuleClass) {
        let path = self.path(c1, c2, degree, precision, mode);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let Ok(text) = serde_json::to_string(class) else { return };
        // a failed write only costs a recomputation later
        if fs::write(&tmp, text).is_ok() {
            let _ = fs::rename(&tmp, &path);
        }
    }
}

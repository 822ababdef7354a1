#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riflex_core::io::frames::{write_netpbm, write_rflx};
use riflex_core::io::schema::schema;
use riflex_core::FrameSequence;
use serde_json::Value;

pub fn riflex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riflex"))
        .args(args)
        .env_remove("RIFLEX_THREADS")
        .output()
        .expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Schema violations of `text` under the bundled schema `name`.
pub fn schema_errors(name: &str, text: &str) -> Vec<String> {
    let s: Value = serde_json::from_str(schema(name).expect("bundled schema")).unwrap();
    let v = jsonschema::validator_for(&s).unwrap();
    let instance: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => return vec![format!("not JSON: {e}")],
    };
    v.iter_errors(&instance).map(|e| e.to_string()).collect()
}

/// Reference spectrum with `N_4 = 32` and `r_4 = 2` at `L = 64`.
pub fn reference_base() -> f64 {
    (16.0 / std::f64::consts::PI).powf(8.0 / 3.0)
}

pub struct Fixtures {
    pub dir: tempfile::TempDir,
    pub config: PathBuf,
    /// One component with period 24, for `intrinsic --propose`.
    pub single: PathBuf,
    pub pgm_dir: PathBuf,
    pub rflx: PathBuf,
}

impl Fixtures {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn config_arg(&self) -> String {
        self.config.display().to_string()
    }
}

pub fn config_json(strategy: &str) -> String {
    format!(
        r#"{{
  "name": "reference",
  "model": {{ "axes": [ {{ "axis": "time", "d_prime": 16, "base": {:.17e}, "train_len": 64, "intrinsic_k": 4 }} ] }},
  "strategies": [ {{ "axis": "time", "scale": 2.0, "strategy": {{ "name": "{strategy}" }} }} ],
  "norepeat": {{ "expected_period": 8, "window": 2 }}
}}
"#,
        reference_base()
    )
}

/// Config, a looping PGM directory and a drifting RFLX1 video, all seeded.
pub fn fixtures() -> Fixtures {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, config_json("riflex")).unwrap();
    let single = dir.path().join("single.json");
    std::fs::write(
        &single,
        format!(
            r#"{{"model":{{"axes":[{{"axis":"time","thetas":[{:.17e}],"train_len":24}}]}}}}"#,
            std::f64::consts::TAU / 24.0
        ),
    )
    .unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let pgm_dir = dir.path().join("loop");
    std::fs::create_dir(&pgm_dir).unwrap();
    let period = 8;
    let base: Vec<Vec<u8>> = (0..period)
        .map(|_| (0..6 * 5).map(|_| rng.gen()).collect())
        .collect();
    for t in 0..24 {
        write_netpbm(
            &pgm_dir.join(format!("frame_{t:03}.pgm")),
            6,
            5,
            1,
            &base[t % period],
        )
        .unwrap();
    }

    let rflx = dir.path().join("drift.rflx");
    let frames = (0..24)
        .map(|t| {
            (0..4 * 4 * 3)
                .map(|_| 10.0 * t as f64 + rng.gen_range(0.0..1.0))
                .collect()
        })
        .collect();
    write_rflx(&rflx, &FrameSequence::new(4, 4, 3, frames).unwrap()).unwrap();

    Fixtures {
        dir,
        config,
        single,
        pgm_dir,
        rflx,
    }
}

pub fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

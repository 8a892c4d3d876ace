//! Provenance manifests: tool version, stage parameters and SHA-256 hashes of
//! inputs and outputs. JSON artifacts carry the manifest under a `manifest`
//! key; line-oriented artifacts get a `<file>.manifest.json` sidecar.

use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TOOL: &str = "minpair";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub stage: String,
    pub inputs: Vec<InputHash>,
    pub params: serde_json::Value,
    /// Hash of the artifact body: the whole file for sidecars, the JSON
    /// without its `manifest` key for embedded manifests.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_sha256: Option<String>,
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let mut file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

impl Manifest {
    pub fn new(stage: &str, params: serde_json::Value) -> Manifest {
        Manifest {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            stage: stage.to_string(),
            inputs: Vec::new(),
            params,
            output_sha256: None,
        }
    }

    pub fn input(mut self, path: impl AsRef<Path>) -> Result<Manifest> {
        let path = path.as_ref();
        self.inputs.push(InputHash {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(self)
    }

    pub fn inputs<P: AsRef<Path>>(self, paths: impl IntoIterator<Item = P>) -> Result<Manifest> {
        paths.into_iter().try_fold(self, |m, p| m.input(p))
    }

    /// Re-hashes every input and reports the first mismatch.
    pub fn verify_inputs(&self) -> Result<()> {
        for input in &self.inputs {
            let now = sha256_file(&input.path)?;
            if now != input.sha256 {
                return Err(Error::Manifest(format!("input {} changed since the artifact was built", input.path)));
            }
        }
        Ok(())
    }
}

pub fn sidecar_path(artifact: impl AsRef<Path>) -> PathBuf {
    let mut s = artifact.as_ref().as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Hashes an already written line-oriented artifact and writes its sidecar.
pub fn write_sidecar(artifact: impl AsRef<Path>, mut manifest: Manifest) -> Result<()> {
    let artifact = artifact.as_ref();
    manifest.output_sha256 = Some(sha256_file(artifact)?);
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::json("manifest", e))?;
    text.push('\n');
    write_bytes(&sidecar_path(artifact), text.as_bytes())
}

fn body_hash(value: &serde_json::Value) -> Result<String> {
    let bytes = serde_json::to_vec(value).map_err(|e| Error::json("artifact body", e))?;
    Ok(sha256_bytes(&bytes))
}

/// Writes `value` (which must serialize to a JSON object) with the manifest embedded.
pub fn write_json_artifact(path: impl AsRef<Path>, value: &impl Serialize, mut manifest: Manifest) -> Result<()> {
    let path = path.as_ref();
    let mut value = serde_json::to_value(value).map_err(|e| Error::json(path.display().to_string(), e))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::Manifest(format!("{} is not a JSON object", path.display())))?;
    obj.remove("manifest");
    manifest.output_sha256 = Some(body_hash(&value)?);
    let m = serde_json::to_value(&manifest).map_err(|e| Error::json("manifest", e))?;
    value.as_object_mut().expect("checked above").insert("manifest".into(), m);
    let mut bytes = serde_json::to_vec(&value).map_err(|e| Error::json(path.display().to_string(), e))?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

/// Reads the manifest of an artifact (sidecar first, then embedded) and checks
/// the output hash and every input hash.
pub fn verify_artifact(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let sidecar = sidecar_path(path);
    let manifest = if sidecar.exists() {
        let text = std::fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
        let m: Manifest = serde_json::from_str(&text).map_err(|e| Error::json(sidecar.display().to_string(), e))?;
        if m.output_sha256.as_deref() != Some(sha256_file(path)?.as_str()) {
            return Err(Error::Manifest(format!("{} does not match its sidecar hash", path.display())));
        }
        m
    } else {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))?;
        let m = value
            .as_object_mut()
            .and_then(|o| o.remove("manifest"))
            .ok_or_else(|| Error::Manifest(format!("{} has no manifest", path.display())))?;
        let m: Manifest = serde_json::from_value(m).map_err(|e| Error::json("manifest", e))?;
        if m.output_sha256.as_deref() != Some(body_hash(&value)?.as_str()) {
            return Err(Error::Manifest(format!("{} body does not match its manifest hash", path.display())));
        }
        m
    };
    if manifest.tool != TOOL {
        return Err(Error::Manifest(format!("{} was not written by {TOOL}", path.display())));
    }
    manifest.verify_inputs()?;
    Ok(manifest)
}

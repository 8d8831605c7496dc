//! Run configuration: a single JSON file whose relative paths resolve
//! against the file's own directory. Command-line flags override it.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use discatt::features::BundlePaths;
use discatt::sme::SmeHyperparams;
use discatt::SvmParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resources {
    pub embeddings: PathBuf,
    pub leads: PathBuf,
    pub lexicon: PathBuf,
    pub unigrams: PathBuf,
    pub bigrams: PathBuf,
    pub kg_edges: PathBuf,
    /// Default schema when absent.
    #[serde(default)]
    pub schema: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Splits {
    pub train: PathBuf,
    pub validation: PathBuf,
    pub test: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmeSettings {
    pub term_dim: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub negatives_per_positive: usize,
    pub init_from_embeddings: bool,
}

impl Default for SmeSettings {
    fn default() -> Self {
        let hp = SmeHyperparams::default();
        Self {
            term_dim: hp.term_dim,
            iterations: hp.iterations,
            learning_rate: hp.learning_rate,
            negatives_per_positive: hp.negatives_per_positive,
            init_from_embeddings: hp.init_from_embeddings,
        }
    }
}

fn default_bootstrap() -> usize {
    discatt::evaluation::DEFAULT_BOOTSTRAP_SAMPLES
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    pub resources: Resources,
    pub splits: Splits,
    #[serde(default)]
    pub sme: SmeSettings,
    #[serde(default)]
    pub classifier: SvmParams,
    #[serde(default = "default_bootstrap")]
    pub bootstrap_samples: usize,
}

/// Flag values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub leads: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub unigrams: Option<PathBuf>,
    pub bigrams: Option<PathBuf>,
    pub kg_edges: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub train: Option<PathBuf>,
    pub validation: Option<PathBuf>,
    pub test: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(CliError::Config)?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))
            .map_err(CliError::Config)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve(base);
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let r = &mut self.resources;
        for p in [
            &mut r.embeddings,
            &mut r.leads,
            &mut r.lexicon,
            &mut r.unigrams,
            &mut r.bigrams,
            &mut r.kg_edges,
        ] {
            fix(p);
        }
        if let Some(s) = r.schema.as_mut() {
            fix(s);
        }
        let s = &mut self.splits;
        for p in [&mut s.train, &mut s.validation, &mut s.test] {
            fix(p);
        }
        fix(&mut self.out_dir);
    }

    fn apply(&mut self, o: &Overrides) {
        let set = |dst: &mut PathBuf, src: &Option<PathBuf>| {
            if let Some(p) = src {
                *dst = p.clone();
            }
        };
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        set(&mut self.out_dir, &o.out_dir);
        let r = &mut self.resources;
        set(&mut r.embeddings, &o.embeddings);
        set(&mut r.leads, &o.leads);
        set(&mut r.lexicon, &o.lexicon);
        set(&mut r.unigrams, &o.unigrams);
        set(&mut r.bigrams, &o.bigrams);
        set(&mut r.kg_edges, &o.kg_edges);
        if o.schema.is_some() {
            r.schema = o.schema.clone();
        }
        set(&mut self.splits.train, &o.train);
        set(&mut self.splits.validation, &o.validation);
        set(&mut self.splits.test, &o.test);
    }

    /// Every declared input path, keyed by role, in a fixed order.
    pub fn inputs(&self) -> Vec<(&'static str, &Path)> {
        let r = &self.resources;
        let mut v: Vec<(&'static str, &Path)> = vec![
            ("embeddings", &r.embeddings),
            ("leads", &r.leads),
            ("lexicon", &r.lexicon),
            ("unigrams", &r.unigrams),
            ("bigrams", &r.bigrams),
            ("kg_edges", &r.kg_edges),
        ];
        if let Some(s) = &r.schema {
            v.push(("schema", s));
        }
        v.push(("train", &self.splits.train));
        v.push(("validation", &self.splits.validation));
        v.push(("test", &self.splits.test));
        v
    }

    fn validate(&self) -> Result<(), CliError> {
        for (role, path) in self.inputs() {
            if !path.is_file() {
                return Err(CliError::Config(anyhow!(
                    "{role} file {} does not exist",
                    path.display()
                )));
            }
        }
        self.classifier
            .validate()
            .map_err(|e| CliError::Config(e.into()))?;
        if self.bootstrap_samples < 2 {
            return Err(CliError::Config(anyhow!("bootstrap_samples must be >= 2")));
        }
        self.sme_hyperparams()
            .validate()
            .map_err(|e| CliError::Config(e.into()))
    }

    /// Seed for a named component, derived from the run seed.
    pub fn sub_seed(&self, name: &str) -> u64 {
        let digest = Sha256::digest(format!("{}:{name}", self.seed).as_bytes());
        u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
    }

    pub fn sme_hyperparams(&self) -> SmeHyperparams {
        SmeHyperparams {
            learning_rate: self.sme.learning_rate,
            iterations: self.sme.iterations,
            negatives_per_positive: self.sme.negatives_per_positive,
            term_dim: self.sme.term_dim,
            seed: self.sub_seed("sme"),
            init_from_embeddings: self.sme.init_from_embeddings,
        }
    }

    pub fn bootstrap(&self) -> discatt::evaluation::BootstrapSettings {
        discatt::evaluation::BootstrapSettings {
            samples: self.bootstrap_samples,
            seed: self.sub_seed("bootstrap"),
        }
    }

    pub fn sme_model_path(&self) -> PathBuf {
        self.out_dir.join("sme_model.bin")
    }

    pub fn classifier_path(&self) -> PathBuf {
        self.out_dir.join("classifier.json")
    }

    pub fn bundle_paths(&self) -> BundlePaths {
        let r = &self.resources;
        BundlePaths {
            embeddings: r.embeddings.clone(),
            leads: r.leads.clone(),
            lexicon: r.lexicon.clone(),
            unigrams: r.unigrams.clone(),
            bigrams: r.bigrams.clone(),
            sme_model: self.sme_model_path(),
        }
    }

    /// SHA-256 over the seed, every hyperparameter, and the content (not the
    /// location) of every input file.
    pub fn hash(&self) -> Result<String, CliError> {
        let mut h = Sha256::new();
        let settings = serde_json::json!({
            "seed": self.seed,
            "sme": self.sme,
            "classifier": self.classifier,
            "bootstrap_samples": self.bootstrap_samples,
        });
        h.update(settings.to_string().as_bytes());
        for (role, path) in self.inputs() {
            let bytes = fs::read(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(CliError::Config)?;
            h.update(role.as_bytes());
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(&bytes);
        }
        Ok(hex::encode(h.finalize()))
    }

    /// A configured split by name, or a file path.
    pub fn split(&self, arg: &str) -> (String, PathBuf) {
        match arg {
            "train" => ("train".into(), self.splits.train.clone()),
            "validation" => ("validation".into(), self.splits.validation.clone()),
            "test" => ("test".into(), self.splits.test.clone()),
            path => {
                let p = PathBuf::from(path);
                let name = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "split".into());
                (name, p)
            }
        }
    }
}

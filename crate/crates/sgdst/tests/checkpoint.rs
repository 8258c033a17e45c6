use std::path::PathBuf;

use sgdst::checkpoint::{load_bundle, Checkpoint, HeadKind};
use sgdst_core::corpus::{make_training_examples, Examples, Task};
use sgdst_core::encoder::{BaselineEncoder, Encoder, EncoderConfig};
use sgdst_core::mrc;
use sgdst_core::optim::TrainConfig;
use sgdst_core::wd::WdParams;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

#[test]
fn reload_is_bit_exact() {
    let schema = sgdst::synth::schema();
    let dialogues = sgdst::synth::reset_fixture();
    let Examples::Mrc(examples) = make_training_examples(&dialogues, &schema, Task::Mrc).unwrap() else { panic!() };
    let enc_config = EncoderConfig { dim: 16, seed: 5, ..Default::default() };
    let encoder = BaselineEncoder::new(enc_config.clone()).unwrap();
    let config = TrainConfig { epochs: 5, seed: 5, ..Default::default() };
    let (params, log) = mrc::train(&examples, &encoder, 8, &config, |_, _| {}).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mrc.json");
    let ck = Checkpoint::mrc(params.clone(), config, enc_config, log.epoch_loss);
    ck.save(&path).unwrap();
    let back = Checkpoint::load(&path).unwrap();
    assert_eq!(back, ck);
    let reloaded = back.mrc.unwrap();
    assert!(params.flatten().iter().zip(reloaded.flatten()).all(|(a, b)| a.to_bits() == b.to_bits()));
    for ex in &examples {
        let a = mrc::answer(&encoder, &params, &ex.context, &ex.question, 16, 0.5).unwrap();
        let b = mrc::answer(&encoder, &reloaded, &ex.context, &ex.question, 16, 0.5).unwrap();
        assert_eq!(a, b);
    }
    let reps = encoder.encode(&examples[0].context.tokens, &[]).unwrap();
    assert_eq!(mrc::forward(&reps, &params, None).unwrap().start_logits, mrc::forward(&reps, &reloaded, None).unwrap().start_logits);
}

#[test]
fn wrong_section_or_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ck.json");
    let enc = EncoderConfig { dim: 8, ..Default::default() };
    let mut ck = Checkpoint::wd(HeadKind::Intent, WdParams::zeros(8, 4), TrainConfig::default(), enc, vec![]);
    ck.format_version = 99;
    ck.save(&path).unwrap();
    assert!(Checkpoint::load(&path).is_err());
    ck.format_version = 1;
    ck.kind = HeadKind::Mrc;
    ck.save(&path).unwrap();
    assert!(Checkpoint::load(&path).unwrap_err().to_string().contains("wrong parameter section"));
}

#[test]
fn committed_bundle_loads() {
    let bundle = load_bundle(&root().join("data/models/manifest.json")).unwrap();
    assert_eq!(bundle.encoder.dim, 64);
    assert!(bundle.lexicon.lookup("theater").contains("broadway"));
}

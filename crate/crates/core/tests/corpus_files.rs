//! Corpus, reference and model files read from disk.

use std::fs;

use mastermind_core::harness::{
    build_variation_model, load_reference, load_sequences, InputFormat, LoadOptions,
};
use mastermind_core::{Alphabet, Error, VariationModel};
use tempfile::TempDir;

#[test]
fn fasta_and_line_files_load() {
    let dir = TempDir::new().unwrap();
    let fasta = dir.path().join("c.fa");
    fs::write(&fasta, ">a first\nacgt\nAC GT\n\n>b\nACGA\n").unwrap();
    let corpus = load_sequences(&fasta, &Alphabet::dna(), LoadOptions::default()).unwrap();
    let ids: Vec<&str> = corpus.records().iter().map(|r| r.id.as_str()).collect();
    assert_eq!(ids, ["a", "b"]);
    assert_eq!(Alphabet::dna().render(&corpus.records()[0].sequence), "ACGTACGT");

    let lines = dir.path().join("c.txt");
    fs::write(&lines, "ACGT\nACGA\n\nTTTT\n").unwrap();
    let options = LoadOptions {
        format: InputFormat::Lines,
        ..LoadOptions::default()
    };
    assert_eq!(load_sequences(&lines, &Alphabet::dna(), options).unwrap().len(), 3);
}

#[test]
fn bad_files_name_their_problem() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.fa");
    fs::write(&empty, "").unwrap();
    assert!(matches!(
        load_sequences(&empty, &Alphabet::dna(), LoadOptions::default()),
        Err(Error::Parse { line: 1, .. })
    ));

    let foreign = dir.path().join("n.fa");
    fs::write(&foreign, ">ok\nACGT\n>gap\nACNT\n").unwrap();
    match load_sequences(&foreign, &Alphabet::dna(), LoadOptions::default()) {
        Err(Error::InvalidRecord { record, line, symbol }) => {
            assert_eq!((record.as_str(), line, symbol), ("gap", 4, 'N'));
        }
        other => panic!("unexpected {other:?}"),
    }
    let lenient = LoadOptions {
        skip_invalid: true,
        ..LoadOptions::default()
    };
    assert_eq!(load_sequences(&foreign, &Alphabet::dna(), lenient).unwrap().len(), 1);

    let missing = dir.path().join("missing.fa");
    assert!(matches!(
        load_reference(&missing, &Alphabet::dna()),
        Err(Error::Io(_))
    ));
    let two = dir.path().join("two.fa");
    fs::write(&two, ">r1\nACGT\n>r2\nACGT\n").unwrap();
    assert!(load_reference(&two, &Alphabet::dna()).is_err());
}

#[test]
fn built_model_survives_a_file_round_trip() {
    let dir = TempDir::new().unwrap();
    let reference_path = dir.path().join("ref.fa");
    fs::write(&reference_path, ">ref\nACGTACGTAC\n").unwrap();
    let corpus_path = dir.path().join("c.fa");
    fs::write(&corpus_path, ">s1\nACTTACGTAC\n>s2\nACGTACGGTAC\n").unwrap();

    let alphabet = Alphabet::dna();
    let reference = load_reference(&reference_path, &alphabet).unwrap();
    let corpus = load_sequences(&corpus_path, &alphabet, LoadOptions::default()).unwrap();
    let built = build_variation_model(&corpus, &reference).unwrap();
    assert_eq!(built.model.sub_positions(), [2]);
    // The substitution contributes its insertion half at gap 2.
    assert_eq!(built.model.insertion_sites(), [2, 6]);

    let model_path = dir.path().join("model.txt");
    fs::write(&model_path, built.model.to_text()).unwrap();
    let text = fs::read_to_string(&model_path).unwrap();
    let reread = VariationModel::parse(&text, reference, "model.txt").unwrap();
    assert_eq!(reread, built.model);
}

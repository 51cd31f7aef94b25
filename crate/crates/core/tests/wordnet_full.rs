//! Runs against a WordNet 3.x database directory named by `WORDNET_DIR`.
//! Skipped when the variable is unset.

use std::path::PathBuf;

use lingvar::interventions::{antonym_sub, hyponym_sub};
use lingvar::lexicons::{first_antonym, first_hyponym, SenseGraph};

fn database() -> Option<SenseGraph> {
    let dir = PathBuf::from(std::env::var_os("WORDNET_DIR")?);
    Some(SenseGraph::load_database(&dir).unwrap())
}

#[test]
fn substitutions_from_database() {
    let Some(graph) = database() else {
        eprintln!("WORDNET_DIR unset; skipping");
        return;
    };
    assert!(graph.synset_count() > 100_000);
    assert_eq!(first_hyponym(&graph, "dog").as_deref(), Some("puppy"));
    assert_eq!(first_hyponym(&graph, "boot").as_deref(), Some("buskin"));
    // The noun sense comes first.
    assert_eq!(first_antonym(&graph, "good").as_deref(), Some("evil"));
    assert_eq!(first_antonym(&graph, "nice").as_deref(), Some("nasty"));
    assert_eq!(first_antonym(&graph, "table"), None);
    let r = hyponym_sub("Dog", &graph);
    assert!(r.changed);
    assert!(r.surface().unwrap().starts_with(char::is_uppercase));
    assert!(antonym_sub("good", &graph).changed);
}

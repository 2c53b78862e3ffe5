use std::collections::BTreeSet;

use flexcover_core::inventory::{
    extract_inventory, parse_turtle, to_ntriples, Literal, Node, OntologyId, Resource, Triple, TurtleErrorKind,
};
use proptest::prelude::*;

fn iri() -> impl Strategy<Value = String> {
    "[a-z]{1,6}".prop_map(|s| format!("urn:x:{s}"))
}

fn resource() -> impl Strategy<Value = Resource> {
    prop_oneof![iri().prop_map(Resource::Iri), "[a-z][a-z0-9]{0,4}".prop_map(Resource::Blank)]
}

fn literal() -> impl Strategy<Value = Literal> {
    let lexical = "[ -~\t\n\"\\\\éß]{0,12}";
    prop_oneof![
        lexical.prop_map(|l| Literal { lexical: l, datatype: None, lang: None }),
        (lexical, "[a-z]{2}(-[a-z]{2})?").prop_map(|(l, g)| Literal { lexical: l, datatype: None, lang: Some(g) }),
        (lexical, iri()).prop_map(|(l, d)| Literal { lexical: l, datatype: Some(d), lang: None }),
    ]
}

fn triple() -> impl Strategy<Value = Triple> {
    let object = prop_oneof![resource().prop_map(Node::Resource), literal().prop_map(Node::Literal)];
    (resource(), iri(), object).prop_map(|(subject, predicate, object)| Triple { subject, predicate, object })
}

proptest! {
    #[test]
    fn ntriples_roundtrip(triples in prop::collection::btree_set(triple(), 0..20)) {
        let text = to_ntriples(&triples);
        let back = parse_turtle(&text).unwrap();
        prop_assert_eq!(&back, &triples);
        prop_assert_eq!(to_ntriples(&back), text);
    }

    #[test]
    fn parse_is_deterministic(triples in prop::collection::btree_set(triple(), 0..10)) {
        let text = to_ntriples(&triples);
        prop_assert_eq!(parse_turtle(&text).unwrap(), parse_turtle(&text).unwrap());
    }

    /// Truncating a valid document never panics; it parses or reports a
    /// position inside the text.
    #[test]
    fn truncation_reports_position(triples in prop::collection::btree_set(triple(), 1..6), cut in 0usize..400) {
        let text = to_ntriples(&triples);
        let end = text.char_indices().map(|(i, _)| i).take_while(|i| *i <= cut).last().unwrap_or(0);
        if let Err(e) = parse_turtle(&text[..end]) {
            prop_assert!(e.line >= 1 && e.line <= text[..end].lines().count().max(1) + 1);
        }
    }
}

#[test]
fn prefixed_and_abbreviated_forms() {
    let text = r#"
        @prefix ex: <urn:ex#> .
        PREFIX owl: <http://www.w3.org/2002/07/owl#>
        @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
        ex:Meter a owl:Class ; rdfs:label "Meter"@en , "Zähler"@de .
        ex:hasPart a owl:ObjectProperty .
        ex:reading a owl:DatatypeProperty .
        _:b1 ex:hasPart ex:Meter .
    "#;
    let triples = parse_turtle(text).unwrap();
    assert_eq!(triples.len(), 6);
    let inv = extract_inventory(&triples, OntologyId::Brick);
    assert_eq!(inv.len(), 3);
    assert!(inv.get("urn:ex#Meter").unwrap().labels.contains("Zähler"));
}

#[test]
fn unsupported_constructs_are_named() {
    for (text, what) in [
        ("<urn:a> <urn:p> [ <urn:q> <urn:b> ] .", "blank node property list"),
        ("<urn:a> <urn:p> ( <urn:b> ) .", "collection"),
        ("<urn:a> <urn:p> \"\"\"x\"\"\" .", "multiline literal"),
    ] {
        let err = parse_turtle(text).unwrap_err();
        assert_eq!(err.kind, TurtleErrorKind::Unsupported(what), "{text}");
        assert_eq!(err.line, 1);
    }
}

#[test]
fn empty_document_is_empty_set() {
    assert_eq!(parse_turtle("# nothing\n\n").unwrap(), BTreeSet::new());
}

mod common;

use common::criteria;

#[test]
fn datatype_declarations() {
    criteria::datatype_goldens().unwrap();
}

#[test]
fn hd2_listing() {
    criteria::hd2_golden().unwrap();
}

#[test]
fn hd2_case_and_equation_forms_are_identical() {
    criteria::hd2_forms_identical().unwrap();
}

#[test]
fn dictionary_listing() {
    criteria::dict_golden().unwrap();
}

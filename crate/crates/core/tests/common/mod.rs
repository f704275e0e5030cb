#![allow(dead_code)]

use serde_json::Value;

pub struct Record {
    pub record: String,
    pub tets: usize,
    pub cusps: usize,
    pub raw: Vec<Vec<(usize, [u8; 4])>>,
    pub gluings: Vec<Vec<(usize, [u8; 4])>>,
    pub top_faces: Vec<[usize; 2]>,
    pub veer: Vec<Vec<char>>,
    pub h1: String,
}

fn table(v: &Value) -> Vec<Vec<(usize, [u8; 4])>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|tet| {
            tet.as_array()
                .unwrap()
                .iter()
                .map(|g| {
                    let u = g[0].as_u64().unwrap() as usize;
                    let p: Vec<u8> = g[1].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as u8).collect();
                    (u, [p[0], p[1], p[2], p[3]])
                })
                .collect()
        })
        .collect()
}

pub fn census() -> Vec<Record> {
    let text = include_str!("../data/census_fixture.json");
    let v: Value = serde_json::from_str(text).unwrap();
    v.as_array()
        .unwrap()
        .iter()
        .map(|r| Record {
            record: r["record"].as_str().unwrap().to_string(),
            tets: r["tets"].as_u64().unwrap() as usize,
            cusps: r["cusps"].as_u64().unwrap() as usize,
            raw: table(&r["raw_gluings"]),
            gluings: table(&r["gluings"]),
            top_faces: r["top_faces"]
                .as_array()
                .unwrap()
                .iter()
                .map(|p| [p[0].as_u64().unwrap() as usize, p[1].as_u64().unwrap() as usize])
                .collect(),
            veer: r["veer"]
                .as_array()
                .unwrap()
                .iter()
                .map(|row| row.as_array().unwrap().iter().map(|c| c.as_str().unwrap().chars().next().unwrap()).collect())
                .collect(),
            h1: r["h1_regina"].as_str().unwrap().to_string(),
        })
        .collect()
}

pub fn small(max_tets: usize) -> Vec<Record> {
    census().into_iter().filter(|r| r.tets <= max_tets).collect()
}

pub const FIG8: &str = "cPcbbbiht_12";

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use super::{refuse_invalid, CodegenError};
use crate::model::{
    DataType, Field, ListElement, Microservice, Model, ObjectTarget, QualifiedName,
};

/// Schema expansion with `$ref` indirection for structures already being
/// expanded further up.
struct Schemas<'m> {
    model: &'m Model,
    stack: Vec<QualifiedName>,
    definitions: BTreeMap<String, Value>,
}

impl<'m> Schemas<'m> {
    fn object(&mut self, name: &QualifiedName) -> Value {
        if self.stack.contains(name) {
            let key = name.to_string();
            if !self.definitions.contains_key(&key) {
                // Reserve the slot so the nested expansion below stops here.
                self.definitions.insert(key.clone(), Value::Null);
                let saved = std::mem::replace(&mut self.stack, vec![name.clone()]);
                let body = self.expand(name);
                self.stack = saved;
                self.definitions.insert(key.clone(), body);
            }
            return json!({ "$ref": key });
        }
        self.stack.push(name.clone());
        let body = self.expand(name);
        self.stack.pop();
        body
    }

    fn expand(&mut self, name: &QualifiedName) -> Value {
        let model = self.model;
        let Some(obj) = model.data_object(name) else {
            return Value::Null;
        };
        let mut map = Map::new();
        for field in &obj.fields {
            let schema = match field {
                Field::Data(d) => json!(d.primitive.keyword()),
                Field::Object(f) => match &f.target {
                    ObjectTarget::Object(r) => self.object(&r.name),
                    ObjectTarget::List(r) => self.list(&r.name),
                },
            };
            map.insert(field.name().to_string(), schema);
        }
        Value::Object(map)
    }

    fn list(&mut self, name: &QualifiedName) -> Value {
        let model = self.model;
        let element = match model.list_type(name).map(|l| &l.element) {
            Some(ListElement::Primitive(p)) => json!(p.keyword()),
            Some(ListElement::Object(r)) => self.object(&r.name),
            None => Value::Null,
        };
        json!([element])
    }

    fn data_type(&mut self, t: &DataType) -> Value {
        match t {
            DataType::Primitive(p) => json!(p.keyword()),
            DataType::Object(r) => self.object(&r.name),
            DataType::List(r) => self.list(&r.name),
        }
    }
}

/// Schema of a parameter type: primitives by keyword, structures as field
/// maps, lists as one-element arrays. Recursive structures are returned in
/// the second component and referenced as `{"$ref": name}`.
pub fn type_schema(model: &Model, t: &DataType) -> (Value, BTreeMap<String, Value>) {
    let mut s = Schemas {
        model,
        stack: Vec::new(),
        definitions: BTreeMap::new(),
    };
    let v = s.data_type(t);
    (v, s.definitions)
}

fn endpoint_json(address: &str, protocol: &QualifiedName, format: &QualifiedName) -> Value {
    json!({
        "address": address,
        "protocol": protocol.to_string(),
        "format": format.to_string(),
    })
}

fn descriptor(model: &Model, svc: &Microservice) -> Value {
    let mut schemas = Schemas {
        model,
        stack: Vec::new(),
        definitions: BTreeMap::new(),
    };
    let interfaces: Vec<Value> = svc
        .interfaces
        .iter()
        .map(|iface| {
            let iname = svc.interface_name(iface);
            let operations: Vec<Value> = iface
                .operations
                .iter()
                .map(|op| {
                    let oname = iname.child(&op.name);
                    let parameters: Vec<Value> = op
                        .parameters
                        .iter()
                        .map(|p| {
                            json!({
                                "name": p.name,
                                "pattern": p.pattern.as_str(),
                                "commType": p.comm_type.as_str(),
                                "type": schemas.data_type(&p.data_type),
                            })
                        })
                        .collect();
                    let endpoints: Vec<Value> = if op.not_implemented {
                        Vec::new()
                    } else {
                        model
                            .artifacts
                            .iter()
                            .flat_map(|a| &a.endpoints)
                            .filter(|e| e.operation.as_ref().is_some_and(|o| o.name == oname))
                            .map(|e| endpoint_json(&e.address, &e.protocol.name, &e.format.name))
                            .collect()
                    };
                    json!({
                        "name": op.name,
                        "notImplemented": op.not_implemented,
                        "parameters": parameters,
                        "endpoints": endpoints,
                    })
                })
                .collect();
            json!({ "name": iface.name, "operations": operations })
        })
        .collect();
    let contract_endpoints: Vec<Value> = model
        .artifacts
        .iter()
        .flat_map(|a| &a.endpoints)
        .filter_map(|e| {
            let c = e.contract.as_ref()?;
            (model.owner_of(&c.name) == Some(&svc.name)).then(|| {
                let mut v = endpoint_json(&e.address, &e.protocol.name, &e.format.name);
                v["contract"] = json!(c.name.to_string());
                v
            })
        })
        .collect();
    json!({
        "name": svc.name.to_string(),
        "type": svc.kind.as_str(),
        "interfaces": interfaces,
        "contractEndpoints": contract_endpoints,
        "definitions": schemas.definitions,
    })
}

/// One `<service>.interface.json` document per microservice.
pub fn gen_interface_descriptors(model: &Model) -> Result<BTreeMap<String, String>, CodegenError> {
    refuse_invalid(model)?;
    Ok(model
        .services
        .iter()
        .map(|svc| {
            (
                format!("{}.interface.json", svc.name),
                crate::model::to_canonical_json(descriptor(model, svc)),
            )
        })
        .collect())
}

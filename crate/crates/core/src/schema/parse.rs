use std::collections::BTreeMap;

use roxmltree::{Document, Node};

use super::model::*;
use super::SchemaError;

struct Ctx<'a, 'input> {
    doc: &'a Document<'input>,
    anonymous: BTreeMap<String, TypeDef>,
}

fn is_xs(node: &Node, local: &str) -> bool {
    node.is_element() && node.tag_name().namespace() == Some(XSD_NS) && node.tag_name().name() == local
}

fn xs_children<'a, 'input>(node: Node<'a, 'input>) -> impl Iterator<Item = Node<'a, 'input>> {
    node.children().filter(|c| c.is_element())
}

impl<'a, 'input> Ctx<'a, 'input> {
    /// Human-readable path to `node`, e.g.
    /// `complexType[Risk]/complexContent/extension/sequence/element[residual] (line 5, column 9)`.
    fn locate(&self, node: Node) -> String {
        let mut parts: Vec<String> = node
            .ancestors()
            .filter(|n| n.is_element() && n.parent().is_some_and(|p| p.is_element()))
            .map(|n| match n.attribute("name") {
                Some(name) => format!("{}[{}]", n.tag_name().name(), name),
                None => n.tag_name().name().to_string(),
            })
            .collect();
        parts.reverse();
        let pos = self.doc.text_pos_at(node.range().start);
        format!("{} (line {}, column {})", parts.join("/"), pos.row, pos.col)
    }

    fn unsupported(&self, node: Node, what: impl Into<String>) -> SchemaError {
        SchemaError::Unsupported {
            construct: what.into(),
            location: self.locate(node),
        }
    }

    fn check_namespace(&self, node: Node) -> Result<(), SchemaError> {
        if node.tag_name().namespace() != Some(XSD_NS) {
            return Err(self.unsupported(node, format!("non-XSD element <{}>", node.tag_name().name())));
        }
        Ok(())
    }

    fn resolve_qname(&self, node: Node, qname: &str) -> Result<TypeRef, SchemaError> {
        let (prefix, local) = match qname.split_once(':') {
            Some((p, l)) => (Some(p), l),
            None => (None, qname),
        };
        let ns = node.lookup_namespace_uri(prefix);
        if ns == Some(XSD_NS) {
            SimpleType::from_xsd_local(local)
                .map(TypeRef::Simple)
                .ok_or_else(|| self.unsupported(node, format!("built-in type xs:{local}")))
        } else if prefix.is_some() && ns.is_none() {
            Err(SchemaError::UnknownType {
                name: qname.to_string(),
                location: format!("undeclared prefix at {}", self.locate(node)),
            })
        } else {
            Ok(TypeRef::Named(local.to_string()))
        }
    }

    fn occurs(&self, node: Node) -> Result<(u32, MaxOccurs), SchemaError> {
        let min = match node.attribute("minOccurs") {
            None => 1,
            Some(v) => v.parse().map_err(|_| SchemaError::InvalidAttribute {
                attribute: "minOccurs".into(),
                value: v.into(),
                location: self.locate(node),
            })?,
        };
        let max = match node.attribute("maxOccurs") {
            None => MaxOccurs::Bounded(1),
            Some("unbounded") => MaxOccurs::Unbounded,
            Some(v) => MaxOccurs::Bounded(v.parse().map_err(|_| SchemaError::InvalidAttribute {
                attribute: "maxOccurs".into(),
                value: v.into(),
                location: self.locate(node),
            })?),
        };
        if let MaxOccurs::Bounded(m) = max {
            if min > m {
                return Err(SchemaError::InvalidAttribute {
                    attribute: "minOccurs".into(),
                    value: format!("{min} > maxOccurs {m}"),
                    location: self.locate(node),
                });
            }
        }
        Ok((min, max))
    }

    fn check_attrs(&self, node: Node, allowed: &[&str]) -> Result<(), SchemaError> {
        for attr in node.attributes() {
            if attr.namespace().is_none() && !allowed.contains(&attr.name()) {
                return Err(self.unsupported(
                    node,
                    format!("attribute {}= on xs:{}", attr.name(), node.tag_name().name()),
                ));
            }
        }
        Ok(())
    }

    fn element(&mut self, node: Node) -> Result<ElementDecl, SchemaError> {
        self.check_attrs(node, &["name", "type", "minOccurs", "maxOccurs", "default"])?;
        let name = node
            .attribute("name")
            .ok_or_else(|| SchemaError::MissingAttribute {
                attribute: "name".into(),
                location: self.locate(node),
            })?
            .to_string();
        let (min_occurs, max_occurs) = self.occurs(node)?;
        let mut inline: Option<TypeRef> = None;
        for child in xs_children(node) {
            self.check_namespace(child)?;
            match child.tag_name().name() {
                "annotation" => {}
                "complexType" => {
                    let location = self.locate(child);
                    let def = self.complex_type(child, String::new())?;
                    self.anonymous.insert(location.clone(), def);
                    inline = Some(TypeRef::Anonymous(location));
                }
                other => return Err(self.unsupported(child, format!("xs:{other} inside xs:element"))),
            }
        }
        let type_ref = match (node.attribute("type"), inline) {
            (Some(_), Some(_)) => return Err(self.unsupported(node, "element with both type= and an inline type")),
            (Some(q), None) => self.resolve_qname(node, q)?,
            (None, Some(r)) => r,
            (None, None) => return Err(self.unsupported(node, "element without a type")),
        };
        let default = node.attribute("default").map(str::to_string);
        if let (Some(d), TypeRef::Simple(st)) = (&default, &type_ref) {
            if st.canonical_value(d).is_none() {
                return Err(SchemaError::InvalidAttribute {
                    attribute: "default".into(),
                    value: d.clone(),
                    location: self.locate(node),
                });
            }
        }
        Ok(ElementDecl {
            name,
            type_ref,
            min_occurs,
            max_occurs,
            default,
            location: self.locate(node),
        })
    }

    fn attribute(&self, node: Node) -> Result<AttributeDecl, SchemaError> {
        self.check_attrs(node, &["name", "type", "use", "default"])?;
        let name = node.attribute("name").ok_or_else(|| SchemaError::MissingAttribute {
            attribute: "name".into(),
            location: self.locate(node),
        })?;
        let q = node
            .attribute("type")
            .ok_or_else(|| self.unsupported(node, "attribute without a type"))?;
        let TypeRef::Simple(datatype) = self.resolve_qname(node, q)? else {
            return Err(self.unsupported(node, format!("attribute of non-simple type {q}")));
        };
        let required = match node.attribute("use") {
            None | Some("optional") => false,
            Some("required") => true,
            Some(other) => return Err(self.unsupported(node, format!("use=\"{other}\""))),
        };
        if let Some(c) = xs_children(node).find(|c| !is_xs(c, "annotation")) {
            return Err(self.unsupported(c, "content inside xs:attribute"));
        }
        Ok(AttributeDecl {
            name: name.to_string(),
            datatype,
            required,
            default: node.attribute("default").map(str::to_string),
        })
    }

    fn choice(&mut self, node: Node) -> Result<ChoiceGroup, SchemaError> {
        self.check_attrs(node, &["minOccurs", "maxOccurs"])?;
        let (min_occurs, max_occurs) = self.occurs(node)?;
        let mut annotation_name = None;
        let mut alternatives = Vec::new();
        for child in xs_children(node) {
            self.check_namespace(child)?;
            match child.tag_name().name() {
                "annotation" => {
                    let text: String = xs_children(child)
                        .filter(|c| is_xs(c, "appinfo"))
                        .flat_map(|c| c.descendants().filter(|d| d.is_text()))
                        .filter_map(|t| t.text())
                        .collect();
                    let text = text.trim();
                    if !text.is_empty() {
                        annotation_name = Some(text.to_string());
                    }
                }
                "element" => alternatives.push(self.element(child)?),
                other => return Err(self.unsupported(child, format!("xs:{other} inside xs:choice"))),
            }
        }
        if alternatives.is_empty() {
            return Err(self.unsupported(node, "empty xs:choice"));
        }
        Ok(ChoiceGroup {
            annotation_name,
            alternatives,
            min_occurs,
            max_occurs,
            location: self.locate(node),
        })
    }

    fn sequence(&mut self, node: Node) -> Result<Vec<Particle>, SchemaError> {
        self.check_attrs(node, &[])?;
        let mut out = Vec::new();
        for child in xs_children(node) {
            self.check_namespace(child)?;
            match child.tag_name().name() {
                "annotation" => {}
                "element" => out.push(Particle::Element(self.element(child)?)),
                "choice" => out.push(Particle::Choice(self.choice(child)?)),
                "sequence" => out.push(Particle::Sequence(self.sequence(child)?)),
                other => return Err(self.unsupported(child, format!("xs:{other} inside xs:sequence"))),
            }
        }
        Ok(out)
    }

    /// Content shared by complexType and extension: one model group plus
    /// attributes.
    fn content(
        &mut self,
        node: Node,
        particles: &mut Vec<Particle>,
        attributes: &mut Vec<AttributeDecl>,
    ) -> Result<(), SchemaError> {
        let mut has_group = false;
        for child in xs_children(node) {
            self.check_namespace(child)?;
            let local = child.tag_name().name();
            match local {
                "annotation" => {}
                "sequence" | "choice" if has_group => return Err(self.unsupported(child, "second model group")),
                "sequence" => {
                    has_group = true;
                    *particles = self.sequence(child)?;
                }
                "choice" => {
                    has_group = true;
                    *particles = vec![Particle::Choice(self.choice(child)?)];
                }
                "attribute" => attributes.push(self.attribute(child)?),
                _ => return Err(self.unsupported(child, format!("xs:{local}"))),
            }
        }
        Ok(())
    }

    fn complex_type(&mut self, node: Node, name: String) -> Result<TypeDef, SchemaError> {
        self.check_attrs(node, &["name", "abstract"])?;
        let mut def = TypeDef {
            name,
            base: None,
            particles: Vec::new(),
            attributes: Vec::new(),
            location: self.locate(node),
        };
        let complex_content = xs_children(node).find(|c| is_xs(c, "complexContent"));
        match complex_content {
            None => {
                let (mut p, mut a) = (Vec::new(), Vec::new());
                self.content(node, &mut p, &mut a)?;
                def.particles = p;
                def.attributes = a;
            }
            Some(cc) => {
                if let Some(other) = xs_children(node).find(|c| !is_xs(c, "annotation") && !is_xs(c, "complexContent"))
                {
                    return Err(self.unsupported(other, "content beside xs:complexContent"));
                }
                self.check_attrs(cc, &[])?;
                let mut ext = None;
                for child in xs_children(cc) {
                    self.check_namespace(child)?;
                    match child.tag_name().name() {
                        "annotation" => {}
                        "extension" if ext.is_none() => ext = Some(child),
                        other => return Err(self.unsupported(child, format!("xs:{other} inside xs:complexContent"))),
                    }
                }
                let ext = ext.ok_or_else(|| self.unsupported(cc, "complexContent without extension"))?;
                self.check_attrs(ext, &["base"])?;
                let base_q = ext.attribute("base").ok_or_else(|| SchemaError::MissingAttribute {
                    attribute: "base".into(),
                    location: self.locate(ext),
                })?;
                match self.resolve_qname(ext, base_q)? {
                    TypeRef::Named(b) => def.base = Some(b),
                    _ => return Err(self.unsupported(ext, format!("extension of {base_q}"))),
                }
                let (mut p, mut a) = (Vec::new(), Vec::new());
                self.content(ext, &mut p, &mut a)?;
                def.particles = p;
                def.attributes = a;
            }
        }
        Ok(def)
    }
}

pub fn parse_schema(document: &[u8]) -> Result<SchemaModel, SchemaError> {
    let text = std::str::from_utf8(document).map_err(|e| SchemaError::Xml {
        line: 0,
        column: 0,
        message: format!("invalid UTF-8: {e}"),
    })?;
    let doc = Document::parse(text).map_err(|e| {
        let pos = e.pos();
        SchemaError::Xml {
            line: pos.row,
            column: pos.col,
            message: e.to_string(),
        }
    })?;
    let root = doc.root_element();
    if !is_xs(&root, "schema") {
        return Err(SchemaError::NotASchema(root.tag_name().name().to_string()));
    }
    let mut ctx = Ctx {
        doc: &doc,
        anonymous: BTreeMap::new(),
    };
    let target_namespace = root.attribute("targetNamespace").unwrap_or("").to_string();
    let mut types = BTreeMap::new();
    let mut roots = Vec::new();
    for child in xs_children(root) {
        ctx.check_namespace(child)?;
        match child.tag_name().name() {
            "annotation" => {}
            "complexType" => {
                let name = child.attribute("name").map(str::trim).unwrap_or("");
                if name.is_empty() {
                    // keep it so the naming rule reports it
                    let location = ctx.locate(child);
                    let def = ctx.complex_type(child, String::new())?;
                    ctx.anonymous.insert(location, def);
                    continue;
                }
                let def = ctx.complex_type(child, name.to_string())?;
                if types.insert(name.to_string(), def).is_some() {
                    return Err(SchemaError::DuplicateType(name.to_string()));
                }
            }
            "element" => roots.push(ctx.element(child)?),
            other => return Err(ctx.unsupported(child, format!("top-level xs:{other}"))),
        }
    }
    let root_element = match roots.len() {
        0 => return Err(SchemaError::MissingRoot),
        1 => roots.pop().expect("one root"),
        _ => return Err(SchemaError::MultipleRoots(roots.into_iter().map(|r| r.name).collect())),
    };
    let model = SchemaModel {
        target_namespace,
        types,
        anonymous_types: ctx.anonymous,
        root_element,
    };
    check_references(&model)?;
    Ok(model)
}

fn check_references(model: &SchemaModel) -> Result<(), SchemaError> {
    let all_defs = model.types.values().chain(model.anonymous_types.values());
    for def in all_defs {
        if let Some(base) = &def.base {
            if !model.types.contains_key(base) {
                return Err(SchemaError::UnknownType {
                    name: base.clone(),
                    location: def.location.clone(),
                });
            }
        }
        for e in def.elements() {
            if let TypeRef::Named(n) = &e.decl.type_ref {
                if !model.types.contains_key(n) {
                    return Err(SchemaError::UnknownType {
                        name: n.clone(),
                        location: e.decl.location.clone(),
                    });
                }
            }
        }
    }
    if let TypeRef::Named(n) = &model.root_element.type_ref {
        if !model.types.contains_key(n) {
            return Err(SchemaError::UnknownType {
                name: n.clone(),
                location: model.root_element.location.clone(),
            });
        }
    }
    for name in model.types.keys() {
        let mut seen = vec![name.as_str()];
        let mut cur = name.as_str();
        while let Some(base) = model.types[cur].base.as_deref() {
            if seen.contains(&base) {
                seen.push(base);
                return Err(SchemaError::ExtensionCycle(
                    seen.into_iter().map(str::to_string).collect(),
                ));
            }
            seen.push(base);
            cur = base;
        }
    }
    Ok(())
}

#include "crowdsmell/metrics/extractor.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include "crowdsmell/common/csv.hpp"
#include "crowdsmell/error.hpp"

namespace crowdsmell::metrics {

namespace {

using java::Modifiers;

bool package_private(const Modifiers& m) { return !m.is_public && !m.is_protected && !m.is_private; }

double ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

int pairs(std::size_t n) { return static_cast<int>(n * (n - 1) / 2); }

bool shares_field(const std::set<std::string>& a, const std::set<std::string>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

std::set<std::string> own_field_names(const ClassInfo& c) {
  std::set<std::string> out;
  for (const auto& f : c.decl->fields) out.insert(f.name);
  return out;
}

int dit(const ProjectModel& model, const ClassInfo& c) {
  int depth = 0;
  for (int cur = c.super; cur >= 0; cur = model.classes()[cur].super) ++depth;
  return depth;
}

// Non-private, non-constructor method signatures of all project ancestors.
std::set<std::string> ancestor_signatures(const ProjectModel& model, const ClassInfo& c) {
  std::set<std::string> out;
  for (int cur = c.super; cur >= 0; cur = model.classes()[cur].super) {
    for (int mi : model.classes()[cur].methods) {
      const auto& m = model.methods()[mi];
      if (!m.decl->is_constructor && !m.decl->mods.is_private) out.insert(m.signature);
    }
  }
  return out;
}

void add_type_coupling(const ProjectModel& model, int own, const java::TypeRef& ref, std::set<int>& out) {
  for (const auto& n : ref.names) {
    int cls = model.class_by_simple_name(n);
    if (cls >= 0 && cls != own) out.insert(cls);
  }
}

struct Aggregates {
  std::map<std::string, double> loc, nocs, nom, noi;
  double project_loc = 0, project_nocs = 0, project_nom = 0, project_noi = 0;
};

Aggregates aggregates(const ProjectModel& model) {
  Aggregates a;
  for (const auto& c : model.classes()) {
    a.loc[c.package];  // packages without top-level types still exist
    double nom = static_cast<double>(c.methods.size());
    a.nocs[c.package] += 1;
    a.nom[c.package] += nom;
    a.project_nocs += 1;
    a.project_nom += nom;
    if (c.is_interface()) {
      a.noi[c.package] += 1;
      a.project_noi += 1;
    }
    if (c.outer < 0) {
      double loc = c.unit->count_code_lines(c.decl->begin_line, c.decl->end_line);
      a.loc[c.package] += loc;
      a.project_loc += loc;
    }
  }
  return a;
}

std::map<std::string, double, std::less<>> class_values(const ProjectModel& model, const ClassInfo& c) {
  std::map<std::string, double, std::less<>> v;
  const auto& decl = *c.decl;
  const auto& all_methods = model.methods();

  int nom = 0, noam = 0, mutators = 0, wmc = 0, wmcnamm = 0, loc_am = 0;
  int public_methods = 0, public_functional = 0;
  int noabm = 0, nocm = 0, nofm = 0, nofnsm = 0, nofsm = 0, nonfnabm = 0, nonfnsm = 0, nonfsm = 0;
  int nodm = 0, nopm = 0, noprm = 0, noplm = 0, nosm = 0;
  int atfd = 0, maxnesting = 0, nmcs = 0;
  std::set<std::string> fanout, called;
  std::set<int> cfnamm, cint, cbo;
  std::vector<const MethodInfo*> cohesive, lcom_methods;

  std::set<std::string> own_keys;
  for (int mi : c.methods) own_keys.insert(c.qualified_name + "#" + all_methods[mi].signature);

  for (int mi : c.methods) {
    const auto& m = all_methods[mi];
    const auto& d = *m.decl;
    const auto& mods = d.mods;
    ++nom;
    if (m.role == MethodRole::Accessor) ++noam;
    if (m.role == MethodRole::Mutator) ++mutators;
    wmc += m.facts.cyclo;
    if (m.is_namm()) {
      wmcnamm += m.facts.cyclo;
    } else {
      loc_am += m.facts.loc;
    }
    if (mods.is_abstract) ++noabm;
    if (d.is_constructor) ++nocm;
    if (mods.is_final) ++nofm;
    if (mods.is_final && !mods.is_static) ++nofnsm;
    if (mods.is_final && mods.is_static) ++nofsm;
    if (!mods.is_final && !mods.is_abstract) ++nonfnabm;
    if (!mods.is_final && !mods.is_static) ++nonfnsm;
    if (!mods.is_final && mods.is_static) ++nonfsm;
    if (package_private(mods)) ++nodm;
    if (mods.is_private) ++nopm;
    if (mods.is_protected) ++noprm;
    if (mods.is_public) ++noplm;
    if (mods.is_static) ++nosm;
    if (mods.is_public && !d.is_constructor) {
      ++public_methods;
      if (m.is_namm() && m.has_body()) ++public_functional;
    }
    if (!d.is_constructor && m.has_body()) {
      lcom_methods.push_back(&m);
      if (m.is_namm()) cohesive.push_back(&m);
    }

    const auto& f = m.facts;
    atfd += f.foreign_accesses;
    maxnesting = std::max(maxnesting, f.max_nesting);
    nmcs += static_cast<int>(f.chain_lengths.size());
    fanout.insert(f.fanout_types.begin(), f.fanout_types.end());
    cfnamm.insert(f.foreign_namm_methods.begin(), f.foreign_namm_methods.end());
    cint.insert(f.foreign_methods.begin(), f.foreign_methods.end());
    cbo.insert(f.coupled_classes.begin(), f.coupled_classes.end());
    add_type_coupling(model, c.index, d.return_type, cbo);
    for (const auto& p : d.params) add_type_coupling(model, c.index, p.type, cbo);
    for (const auto& key : f.called_keys) {
      if (!own_keys.count(key)) called.insert(key);
    }
  }

  int noa = 0, nopa = 0, noda = 0, nopva = 0, nopra = 0, nofa = 0, nofsa = 0, nofnsa = 0, nonfnsa = 0, nosa = 0,
      nonfsa = 0;
  for (const auto& f : decl.fields) {
    const auto& mods = f.mods;
    ++noa;
    if (mods.is_public) ++nopa;
    if (package_private(mods)) ++noda;
    if (mods.is_private) ++nopva;
    if (mods.is_protected) ++nopra;
    if (mods.is_final) ++nofa;
    if (mods.is_final && mods.is_static) ++nofsa;
    if (mods.is_final && !mods.is_static) ++nofnsa;
    if (!mods.is_final && !mods.is_static) ++nonfnsa;
    if (mods.is_static) ++nosa;
    if (!mods.is_final && mods.is_static) ++nonfsa;
    add_type_coupling(model, c.index, f.type, cbo);
  }

  // Cohesion over fields declared in this class.
  const auto fields = own_field_names(c);
  auto used = [&](const MethodInfo* m) {
    std::set<std::string> out;
    for (const auto& name : m->facts.own_fields_used) {
      if (fields.count(name)) out.insert(name);
    }
    return out;
  };
  double tcc = 1.0;
  if (cohesive.size() >= 2) {
    std::vector<std::set<std::string>> sets;
    for (const auto* m : cohesive) sets.push_back(used(m));
    int connected = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (std::size_t j = i + 1; j < sets.size(); ++j) connected += shares_field(sets[i], sets[j]) ? 1 : 0;
    }
    tcc = static_cast<double>(connected) / pairs(sets.size());
  }
  double lcom = 0.0;
  if (lcom_methods.size() >= 2 && !fields.empty()) {
    std::vector<std::set<std::string>> sets;
    for (const auto* m : lcom_methods) sets.push_back(used(m));
    int sharing = 0;
    int disjoint = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (std::size_t j = i + 1; j < sets.size(); ++j) {
        if (shares_field(sets[i], sets[j])) {
          ++sharing;
        } else {
          ++disjoint;
        }
      }
    }
    lcom = std::max(0, disjoint - sharing);
  }

  std::set<int> cint_classes;
  for (int mi : cint) cint_classes.insert(all_methods[mi].class_index);

  const auto inherited = ancestor_signatures(model, c);
  std::set<std::string> redeclared;
  int nmo = 0;
  for (int mi : c.methods) {
    const auto& m = all_methods[mi];
    if (m.decl->is_constructor) continue;
    redeclared.insert(m.signature);
    if (!m.decl->mods.is_private && !m.decl->mods.is_static && inherited.count(m.signature)) ++nmo;
  }
  int nim = 0;
  for (const auto& sig : inherited) nim += redeclared.count(sig) ? 0 : 1;

  const double loc = c.unit->count_code_lines(decl.begin_line, decl.end_line);
  v["LOC"] = loc;
  v["LOCNAMM"] = loc - loc_am;
  v["NOM"] = nom;
  v["NOMNAMM"] = nom - noam - mutators;
  v["NOA"] = noa;
  v["WMC"] = wmc;
  v["WMCNAMM"] = wmcnamm;
  v["AMW"] = ratio(wmc, nom);
  v["AMWNAMM"] = ratio(wmcnamm, nom - noam - mutators);
  v["WOC"] = ratio(public_functional, public_methods + nopa);
  v["TCC"] = tcc;
  v["LCOM"] = lcom;
  v["RFC"] = nom + static_cast<double>(called.size());
  v["CBO"] = static_cast<double>(cbo.size());
  v["NOAM"] = noam;
  v["NOPA"] = nopa;
  v["DIT"] = dit(model, c);
  v["NOC"] = static_cast<double>(c.children.size());
  v["NMO"] = nmo;
  v["NIM"] = nim;
  v["NOII"] = static_cast<double>(c.is_interface() ? decl.extends.size() : decl.implements.size());
  v["NODA"] = noda;
  v["NOPVA"] = nopva;
  v["NOPRA"] = nopra;
  v["NOFA"] = nofa;
  v["NOFSA"] = nofsa;
  v["NOFNSA"] = nofnsa;
  v["NONFNSA"] = nonfnsa;
  v["NOSA"] = nosa;
  v["NONFSA"] = nonfsa;
  v["NOABM"] = noabm;
  v["NOCM"] = nocm;
  v["NONCM"] = nom - nocm;
  v["NOFM"] = nofm;
  v["NOFNSM"] = nofnsm;
  v["NOFSM"] = nofsm;
  v["NONFNABM"] = nonfnabm;
  v["NONFNSM"] = nonfnsm;
  v["NONFSM"] = nonfsm;
  v["NODM"] = nodm;
  v["NOPM"] = nopm;
  v["NOPRM"] = noprm;
  v["NOPLM"] = noplm;
  v["NONAM"] = nom - noam;
  v["NOSM"] = nosm;
  v["ATFD"] = atfd;
  v["FANOUT"] = static_cast<double>(fanout.size());
  v["CFNAMM"] = static_cast<double>(cfnamm.size());
  v["CINT"] = static_cast<double>(cint.size());
  v["CDISP"] = ratio(static_cast<double>(cint_classes.size()), static_cast<double>(cint.size()));
  v["MAXNESTING"] = maxnesting;
  v["NMCS"] = nmcs;
  return v;
}

void add_aggregates(const Aggregates& a, const ClassInfo& c, std::map<std::string, double, std::less<>>& v) {
  auto get = [](const std::map<std::string, double>& m, const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? 0.0 : it->second;
  };
  v["LOC_package"] = get(a.loc, c.package);
  v["NOCS_package"] = get(a.nocs, c.package);
  v["NOM_package"] = get(a.nom, c.package);
  v["NOI_package"] = get(a.noi, c.package);
  v["LOC_project"] = a.project_loc;
  v["NOPK_project"] = static_cast<double>(a.nocs.size());
  v["NOCS_project"] = a.project_nocs;
  v["NOM_project"] = a.project_nom;
  v["NOI_project"] = a.project_noi;
}

void add_method_values(const ProjectModel& model, const MethodInfo& m, std::map<std::string, double, std::less<>>& v) {
  const auto& f = m.facts;
  v["NOP_method"] = static_cast<double>(m.decl->params.size());
  const bool body = m.has_body();
  auto put = [&](const char* key, double value) { v[key] = body ? value : 0.0; };

  std::set<int> cint_classes;
  for (int mi : f.foreign_methods) cint_classes.insert(model.methods()[mi].class_index);
  std::set<int> caller_classes;
  for (int mi : m.callers) caller_classes.insert(model.methods()[mi].class_index);
  double chain_sum = 0;
  int chain_max = 0;
  for (int len : f.chain_lengths) {
    chain_sum += len;
    chain_max = std::max(chain_max, len);
  }
  const double accesses = f.local_accesses + f.foreign_accesses;

  put("LOC_method", f.loc);
  put("CYCLO_method", f.cyclo);
  put("MAXNESTING_method", f.max_nesting);
  put("NOAV_method", static_cast<double>(f.accessed_variables.size()));
  put("ATLD_method", f.local_accesses);
  put("NOLV_method", f.local_vars);
  put("FANOUT_method", static_cast<double>(f.fanout_types.size()));
  put("ATFD_method", f.foreign_accesses);
  put("FDP_method", static_cast<double>(f.data_providers.size()));
  put("CFNAMM_method", static_cast<double>(f.foreign_namm_methods.size()));
  put("CLNAMM_method", static_cast<double>(f.local_namm_methods.size()));
  put("CINT_method", static_cast<double>(f.foreign_methods.size()));
  put("CDISP_method", ratio(static_cast<double>(cint_classes.size()), static_cast<double>(f.foreign_methods.size())));
  put("MAMCL_method", chain_max);
  put("MEMCL_method", ratio(chain_sum, static_cast<double>(f.chain_lengths.size())));
  put("NMCS_method", static_cast<double>(f.chain_lengths.size()));
  put("CC_method", static_cast<double>(caller_classes.size()));
  put("CM_method", static_cast<double>(m.callers.size()));
  put("LAA_method", accesses == 0 ? 1.0 : f.local_accesses / accesses);
  put("CBO_method", static_cast<double>(f.coupled_classes.size()));
}

MetricVector class_vector(const ProjectModel& model, const Aggregates& a, const ClassInfo& c) {
  MetricVector out;
  out.entity = model.class_id(c.index);
  out.values = class_values(model, c);
  add_aggregates(a, c, out.values);
  return out;
}

MetricVector method_vector(const ProjectModel& model, const MetricVector& cls, const MethodInfo& m) {
  MetricVector out;
  out.entity = model.method_id(m.index);
  out.values = cls.values;
  add_method_values(model, m, out.values);
  return out;
}

}  // namespace

MetricVector compute_class_metrics(const ProjectModel& model, const CodeEntityId& class_id) {
  const ClassInfo* c = class_id.method_signature ? nullptr : model.find_class(class_id);
  if (!c) throw Error(ErrorCode::UnknownEntity, "unknown class " + class_id.display());
  return class_vector(model, aggregates(model), *c);
}

MetricVector compute_method_metrics(const ProjectModel& model, const CodeEntityId& method_id) {
  const MethodInfo* m = model.find_method(method_id);
  if (!m) throw Error(ErrorCode::UnknownEntity, "unknown method " + method_id.display());
  const auto cls = class_vector(model, aggregates(model), model.classes()[m->class_index]);
  return method_vector(model, cls, *m);
}

std::vector<MetricVector> extract_all(const ProjectModel& model, Scope scope) {
  const Aggregates a = aggregates(model);
  std::vector<MetricVector> out;
  for (const auto& c : model.classes()) {
    MetricVector cls = class_vector(model, a, c);
    if (scope == Scope::Method) {
      std::set<std::string> seen;
      for (int mi : c.methods) {
        const auto& m = model.methods()[mi];
        if (!m.has_body() || !seen.insert(m.signature).second) continue;
        out.push_back(method_vector(model, cls, m));
      }
    } else {
      out.push_back(std::move(cls));
    }
  }
  std::sort(out.begin(), out.end(), [](const MetricVector& x, const MetricVector& y) { return x.entity < y.entity; });
  return out;
}

std::vector<std::string> metric_csv_header(Scope scope) {
  std::vector<std::string> header{"project", "package", "class", "method"};
  for (const auto& acronym : acronyms_for(scope)) header.emplace_back(acronym);
  return header;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricVector>& vectors, Scope scope,
                       const Provenance& provenance) {
  for (const auto& line : provenance.comment_lines()) out << "# " << line << '\n';
  out << "# scope=" << to_string(scope) << '\n';
  const auto acronyms = acronyms_for(scope);
  out << csv::format_row(metric_csv_header(scope)) << '\n';
  for (const auto& v : vectors) {
    csv::Row row{v.entity.project, v.entity.package, v.entity.class_name, v.entity.method_signature.value_or("")};
    for (const auto& a : acronyms) row.push_back(csv::format_real(v.at(a)));
    out << csv::format_row(row) << '\n';
  }
}

}  // namespace crowdsmell::metrics

#include "ordo/search.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ordo {

std::string SearchStats::str() const {
    std::ostringstream os;
    os << "nodes_expanded=" << nodes_expanded << " nodes_created=" << nodes_created
       << " links_created=" << links_created << " answers=" << answers
       << " answer_events=" << answer_events
       << " first_answer_expansion=" << first_answer_expansion << " time_ms=" << wall_ms
       << " cutoff=" << cutoff;
    return os.str();
}

int SearchGraph::add_node(Clause clause, Substitution binding, int depth) {
    SearchNode n;
    n.id = static_cast<int>(nodes.size());
    n.clause = std::move(clause);
    n.binding = std::move(binding);
    n.depth = depth;
    nodes.push_back(std::move(n));
    return nodes.back().id;
}

int SearchGraph::add_tlink(int from, int to, const Rule* rule, Substitution subst) {
    TransformationLink l;
    l.from = from;
    l.to = to;
    l.rule = rule;
    l.substitution = std::move(subst);
    l.seq = link_seq++;
    int idx = static_cast<int>(tlinks.size());
    tlinks.push_back(std::move(l));
    nodes[from].out_t.push_back(idx);
    nodes[to].in_t.push_back(idx);
    return idx;
}

int SearchGraph::add_rlink(int from, int to, Literal fact, Substitution subst) {
    RestrictionLink l;
    l.from = from;
    l.to = to;
    l.fact = std::move(fact);
    l.substitution = std::move(subst);
    l.seq = link_seq++;
    int idx = static_cast<int>(rlinks.size());
    rlinks.push_back(std::move(l));
    nodes[from].out_r.push_back(idx);
    nodes[to].in_r.push_back(idx);
    return idx;
}

double net_score(const SearchGraph& g, const SearchNode& n,
                 const std::vector<HeuristicModule>& modules) {
    double s = 0;
    for (const auto& m : modules)
        if (m.weight != 0.0) s += m.weight * m.scorer(g, n);
    return s;
}

// ------------------------------------------------------------ expansion

int select_literal(const KnowledgeBase& kb, const Clause& clause) {
    constexpr long kDefer = std::numeric_limits<long>::max();
    long best = kDefer;
    int best_i = -1;
    for (size_t i = 0; i < clause.size(); ++i) {
        const Literal& l = clause[i];
        long count;
        if (!l.positive) {
            if (!l.ground()) continue;  // deferred until positives ground it
            Literal pos = l;
            pos.positive = true;
            bool present = false;
            for (const auto& f : kb.facts(l.pred))
                if (f == pos) {
                    present = true;
                    break;
                }
            count = present ? 0 : 1;
        } else {
            count = kb.num_rules(l.pred);
            for (const auto& f : kb.facts(l.pred))
                if (unify(l, f)) ++count;
        }
        if (count < best) {
            best = count;
            best_i = static_cast<int>(i);
        }
    }
    return best_i;
}

namespace {

Clause splice(const Clause& clause, size_t at, const Clause& replacement,
              const Substitution& theta) {
    Clause out;
    out.reserve(clause.size() - 1 + replacement.size());
    for (size_t i = 0; i < clause.size(); ++i) {
        if (i == at) {
            for (const auto& l : replacement) out.push_back(apply(theta, l));
        } else {
            out.push_back(apply(theta, clause[i]));
        }
    }
    return out;
}

}  // namespace

std::vector<ChildSpec> generate_children(const KnowledgeBase& kb, const Clause& clause,
                                         int depth, const SearchConfig& cfg,
                                         const std::string& rename_tag) {
    std::vector<ChildSpec> out;
    int sel = select_literal(kb, clause);
    if (sel < 0) return out;  // only deferred negatives left: dead
    const Literal& lit = clause[sel];

    if (!lit.positive) {
        // ground negative, no matching stored fact (select_literal
        // guarantees it): closed-world success, consume the literal
        Literal pos = lit;
        pos.positive = true;
        bool present = false;
        for (const auto& f : kb.facts(lit.pred))
            if (f == pos) {
                present = true;
                break;
            }
        if (present) return out;
        ChildSpec c;
        c.transformation = false;
        c.fact = lit;
        c.clause = splice(clause, sel, {}, Substitution{});
        c.depth = depth;
        out.push_back(std::move(c));
        return out;
    }

    const bool transitive = kb.is_transitive(lit.pred);

    // restriction links against stored facts
    if (!transitive) {
        for (const auto& f : kb.facts(lit.pred)) {
            auto theta = unify(lit, f);
            if (!theta) continue;
            ChildSpec c;
            c.transformation = false;
            c.fact = f;
            c.mgu = *theta;
            c.link_subst = *theta;
            c.clause = splice(clause, sel, {}, *theta);
            c.depth = depth;
            out.push_back(std::move(c));
        }
    }

    // transformation links: back-chain through each rule for the predicate
    for (const Rule* r : kb.rules_for(lit.pred)) {
        Substitution rename;
        for (const auto& v : r->vars())
            rename.map[v.name] = Term{v.name + "#" + rename_tag};
        Literal conseq = apply(rename, r->consequent);
        auto theta = unify(lit, conseq);
        if (!theta) continue;
        if (cfg.max_depth > 0 && depth + 1 > cfg.max_depth) continue;
        Clause ante = ordo::apply(rename, r->antecedent);
        ChildSpec c;
        c.transformation = true;
        c.rule = r;
        c.mgu = *theta;
        for (const auto& v : r->vars())
            c.link_subst.map[v.name] = apply(*theta, rename.map[v.name]);
        c.clause = splice(clause, sel, ante, *theta);
        c.depth = depth + 1;
        out.push_back(std::move(c));
    }

    // transitive expansion: resolve against the >=1-step closure of the
    // stored facts (which subsumes the facts themselves)
    if (transitive && lit.args.size() == 2) {
        const Term a = lit.args[0];
        const Term b = lit.args[1];
        const std::string* first = a.is_var() ? nullptr : &a.name;
        const std::string* second = b.is_var() ? nullptr : &b.name;
        for (const auto& [x, y] : kb.transitive_pairs(lit.pred, first, second)) {
            Literal f{lit.pred, {Term{x}, Term{y}}, true};
            auto theta = unify(lit, f);
            if (!theta) continue;
            ChildSpec c;
            c.transformation = false;
            c.fact = f;
            c.mgu = *theta;
            c.link_subst = *theta;
            c.clause = splice(clause, sel, {}, *theta);
            c.depth = depth;
            out.push_back(std::move(c));
        }
    }
    return out;
}

// ---------------------------------------------------------------- queries

std::vector<std::vector<int>> link_sets_to_root(const SearchGraph& g, int node,
                                                size_t max_sets) {
    // ascend over in-links, collecting distinct transformation sequences
    std::unordered_map<int, std::set<std::vector<int>>> memo;
    size_t total = 0;
    std::function<const std::set<std::vector<int>>&(int)> up = [&](int id)
        -> const std::set<std::vector<int>>& {
        auto it = memo.find(id);
        if (it != memo.end()) return it->second;
        std::set<std::vector<int>> acc;
        const SearchNode& n = g.nodes[id];
        if (n.in_t.empty() && n.in_r.empty()) {
            acc.insert(std::vector<int>{});  // root: the single empty path
        } else {
            for (int li : n.in_t) {
                const auto& from_sets = up(g.tlinks[li].from);
                for (const auto& s : from_sets) {
                    std::vector<int> ext = s;
                    ext.push_back(li);
                    acc.insert(std::move(ext));
                }
            }
            for (int li : n.in_r) {
                const auto& from_sets = up(g.rlinks[li].from);
                for (const auto& s : from_sets) acc.insert(s);
            }
        }
        total += acc.size();
        if (total > max_sets)
            throw std::runtime_error("link_sets_to_root: path-set cap exceeded");
        return memo.emplace(id, std::move(acc)).first->second;
    };
    const auto& sets = up(node);
    return {sets.begin(), sets.end()};
}

void mark_success(SearchGraph& g, int answer_node) {
    std::vector<int> stack{answer_node};
    std::set<int> seen;
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (!seen.insert(id).second) continue;
        g.nodes[id].answers_below += 1;
        for (int li : g.nodes[id].in_t) stack.push_back(g.tlinks[li].from);
        for (int li : g.nodes[id].in_r) stack.push_back(g.rlinks[li].from);
    }
}

std::optional<Substitution> project_answer(const std::vector<Term>& query_vars,
                                           const Substitution& binding) {
    Substitution out;
    for (const auto& v : query_vars) {
        Term t = apply(binding, v);
        if (t.is_var()) return std::nullopt;
        out.map[v.name] = t;
    }
    return out;
}

// ---------------------------------------------------------------- Searcher

Searcher::Searcher(const KnowledgeBase& kb, Clause query, SearchConfig cfg,
                   std::vector<HeuristicModule> modules)
    : kb_(kb), cfg_(cfg), modules_(std::move(modules)) {
    if (query.empty()) throw std::invalid_argument("empty query");
    graph_.query = query;
    for (const auto& l : query)
        for (const auto& t : l.args)
            if (t.is_var() &&
                std::find(graph_.query_vars.begin(), graph_.query_vars.end(), t) ==
                    graph_.query_vars.end())
                graph_.query_vars.push_back(t);
    t0_ = std::chrono::steady_clock::now();
    int root = graph_.add_node(std::move(query), Substitution{}, 0);
    stats_.nodes_created = 1;
    rescore(root);
    enqueue(root);
}

std::string Searcher::memo_key(const Substitution& binding, const Clause& clause) const {
    // canonical rename across the answer template and the clause, so two
    // states equal up to variable renaming collide
    std::map<std::string, int> ren;
    std::string out;
    auto emit = [&](const Literal& l) {
        out += l.positive ? "(" : "(! ";
        out += l.pred;
        for (const auto& t : l.args) {
            out += ' ';
            if (t.is_var()) {
                auto [it, fresh] = ren.try_emplace(t.name, static_cast<int>(ren.size()));
                (void)fresh;
                out += "?" + std::to_string(it->second);
            } else {
                out += t.name;
            }
        }
        out += ')';
    };
    for (const auto& l : graph_.query) emit(apply(binding, l));
    out += '|';
    for (const auto& l : clause) emit(l);
    return out;
}

void Searcher::rescore(int id) {
    SearchNode& n = graph_.nodes[id];
    n.score = net_score(graph_, n, modules_);
    ++n.version;
}

void Searcher::enqueue(int id) {
    const SearchNode& n = graph_.nodes[id];
    frontier_.push(QEntry{n.score, n.version, n.id});
}

void Searcher::relax_depth(int id) {
    // shortest-path relaxation along out-links after an in-link arrived;
    // restriction edges carry weight 0, transformation edges weight 1
    std::vector<int> wl{id};
    while (!wl.empty()) {
        int cur = wl.back();
        wl.pop_back();
        const SearchNode& n = graph_.nodes[cur];
        for (int li : n.out_t) {
            const auto& l = graph_.tlinks[li];
            if (n.depth + 1 < graph_.nodes[l.to].depth) {
                graph_.nodes[l.to].depth = n.depth + 1;
                wl.push_back(l.to);
            }
        }
        for (int li : n.out_r) {
            const auto& l = graph_.rlinks[li];
            if (n.depth < graph_.nodes[l.to].depth) {
                graph_.nodes[l.to].depth = n.depth;
                wl.push_back(l.to);
            }
        }
        if (cur != id) {
            SearchNode& m = graph_.nodes[cur];
            if (!m.expanded && !m.is_answer) {
                rescore(cur);
                enqueue(cur);
            }
        }
    }
}

void Searcher::record_answer(int node_id) {
    SearchNode& n = graph_.nodes[node_id];
    n.is_answer = true;
    ++stats_.answer_events;
    mark_success(graph_, node_id);
    if (auto proj = project_answer(graph_.query_vars, n.binding)) {
        if (answers_.emplace(proj->str(), *proj).second &&
            stats_.first_answer_expansion < 0)
            stats_.first_answer_expansion = stats_.nodes_expanded;
    }
}

void Searcher::expand(int id) {
    graph_.nodes[id].expanded = true;
    graph_.nodes[id].selected_literal = select_literal(kb_, graph_.nodes[id].clause);
    // children push into graph_.nodes and invalidate references, so take
    // copies of everything the loop needs from the expanding node
    const Substitution binding = graph_.nodes[id].binding;
    const int depth = graph_.nodes[id].depth;
    std::string tag = std::to_string(static_cast<int>(graph_.nodes.size()));
    auto specs = generate_children(kb_, graph_.nodes[id].clause, depth, cfg_, tag);
    for (auto& spec : specs) {
        Substitution child_binding = compose(binding, spec.mgu);
        if (spec.clause.empty()) {
            // answer node: materialized, never enqueued, never memoized
            int cid = graph_.add_node({}, std::move(child_binding), spec.depth);
            ++stats_.nodes_created;
            if (spec.transformation)
                graph_.add_tlink(id, cid, spec.rule, std::move(spec.link_subst));
            else
                graph_.add_rlink(id, cid, std::move(spec.fact), std::move(spec.link_subst));
            ++stats_.links_created;
            record_answer(cid);
            continue;
        }
        std::string key = memo_key(child_binding, spec.clause);
        auto hit = memo_.find(key);
        if (hit != memo_.end()) {
            int eid = hit->second;
            // a repeat becomes an edge, but only forward: links must run
            // from lower to higher ids (keeps the graph a DAG)
            if (eid > id) {
                if (spec.transformation)
                    graph_.add_tlink(id, eid, spec.rule, std::move(spec.link_subst));
                else
                    graph_.add_rlink(id, eid, std::move(spec.fact),
                                     std::move(spec.link_subst));
                ++stats_.links_created;
                SearchNode& e = graph_.nodes[eid];
                int cand = spec.transformation ? depth + 1 : depth;
                if (cand < e.depth) {
                    e.depth = cand;
                    relax_depth(eid);
                }
                if (!e.expanded && !e.is_answer) {
                    rescore(eid);
                    enqueue(eid);
                }
            }
            continue;
        }
        int cid = graph_.add_node(std::move(spec.clause), std::move(child_binding),
                                  spec.depth);
        ++stats_.nodes_created;
        memo_.emplace(std::move(key), cid);
        if (spec.transformation)
            graph_.add_tlink(id, cid, spec.rule, std::move(spec.link_subst));
        else
            graph_.add_rlink(id, cid, std::move(spec.fact), std::move(spec.link_subst));
        ++stats_.links_created;
        rescore(cid);
        enqueue(cid);
    }
}

bool Searcher::step() {
    if (finished_) return false;
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_)
            .count();
    };
    for (;;) {
        if (cfg_.cutoff_secs > 0 && elapsed() >= cfg_.cutoff_secs) {
            stats_.cutoff = "time";
            finished_ = true;
            return false;
        }
        if (cfg_.max_nodes > 0 && stats_.nodes_created >= cfg_.max_nodes) {
            stats_.cutoff = "nodes";
            finished_ = true;
            return false;
        }
        if (cfg_.max_answers > 0 &&
            static_cast<long>(answers_.size()) >= cfg_.max_answers) {
            stats_.cutoff = "answers";
            finished_ = true;
            return false;
        }
        if (frontier_.empty()) {
            stats_.cutoff = "exhausted";
            finished_ = true;
            return false;
        }
        QEntry top = frontier_.top();
        frontier_.pop();
        SearchNode& n = graph_.nodes[top.id];
        if (n.expanded || n.is_answer || n.version != top.version)
            continue;  // stale entry
        ++stats_.nodes_expanded;
        expansion_order_.push_back(top.id);
        expand(top.id);
        return true;
    }
}

SearchResult Searcher::result() {
    SearchResult r;
    r.stats = stats_;
    r.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_)
            .count();
    r.stats.answers = answers_.size();
    for (const auto& [k, v] : answers_) r.answers.push_back(v);
    return r;
}

SearchResult Searcher::run() {
    while (step()) {
    }
    return result();
}

SearchResult answer_query(const KnowledgeBase& kb, const Clause& query,
                          const SearchConfig& cfg,
                          const std::vector<HeuristicModule>& modules) {
    Searcher s(kb, query, cfg, modules);
    return s.run();
}

HeuristicModule depth_module(double weight) {
    return HeuristicModule{
        "depth", weight,
        [](const SearchGraph&, const SearchNode& n) { return -double(n.depth); }};
}

}  // namespace ordo

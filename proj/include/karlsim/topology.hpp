#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

/* In-vehicle network model: devices, links, routed traffic.
 *
 * The network is a two-tier tree. A rooftop aggregation switch collects the
 * roof sensors and both embedded computers and feeds the core switch over a
 * single fiber uplink; the core switch carries the compute and connectivity
 * devices plus an automotive-Ethernet media switch for the radars. Cameras
 * attach to their embedded computer over a camera serial link, not Ethernet,
 * so they appear as host-attached nodes without a LinkEdge. */

namespace karlsim::topology {

enum class DeviceKind {
    Sensor,
    EmbeddedComputer,
    Hpc,
    Switch,
    Router,
    PowerController,
    InsGrandmaster,
    V2xUnit,
};

/* How the device obtains its notion of time. */
enum class SyncClass {
    Grandmaster,      // source of the time domain
    PtpNative,        // runs two-way sync exchanges itself
    HostTimestamped,  // data stamped by the host compute node
    NtpOnly,          // coarse sync against the hpc
};

enum class LinkMedium { Copper, Fiber, AutomotiveEthernet };

struct DeviceNode {
    std::string id;
    DeviceKind kind = DeviceKind::Sensor;
    SyncClass sync_class = SyncClass::PtpNative;
    std::optional<std::string> host;           // set for host-timestamped leaf devices
    std::optional<std::string> power_channel;  // feeding channel in the power tree

    friend bool operator==(const DeviceNode&, const DeviceNode&) = default;
};

struct LinkEdge {
    std::string node_a;
    std::string node_b;
    LinkMedium medium = LinkMedium::Copper;
    double capacity_bps = 1e9;
    double prop_delay_s = 0.0;
    /* delay(a->b) - delay(b->a). Zero for a symmetric link. */
    double delay_asymmetry_s = 0.0;

    double delay_toward_b() const { return prop_delay_s + 0.5 * delay_asymmetry_s; }
    double delay_toward_a() const { return prop_delay_s - 0.5 * delay_asymmetry_s; }

    friend bool operator==(const LinkEdge&, const LinkEdge&) = default;
};

struct TrafficDemand {
    std::string source;
    std::string sink;
    double rate_bps = 0.0;

    friend bool operator==(const TrafficDemand&, const TrafficDemand&) = default;
};

struct Topology {
    std::vector<DeviceNode> nodes;
    std::vector<LinkEdge> links;

    const DeviceNode* find_node(const std::string& id) const {
        for (const auto& n : nodes)
            if (n.id == id) return &n;
        return nullptr;
    }

    friend bool operator==(const Topology&, const Topology&) = default;
};

struct Violation {
    std::string subject;  // node or link id
    std::string rule;

    friend bool operator==(const Violation&, const Violation&) = default;
};

inline std::string link_key(const LinkEdge& e) { return e.node_a + "--" + e.node_b; }

namespace detail {

/* Adjacency over link edges only (host attachments are not links). */
inline std::map<std::string, std::vector<std::size_t>> link_adjacency(const Topology& t) {
    std::map<std::string, std::vector<std::size_t>> adj;
    for (std::size_t i = 0; i < t.links.size(); ++i) {
        adj[t.links[i].node_a].push_back(i);
        adj[t.links[i].node_b].push_back(i);
    }
    return adj;
}

}  // namespace detail

/* Structural checks. Violations are data, not exceptions: a caller may
 * inspect all of them at once. */
inline std::vector<Violation> validate_topology(const Topology& t) {
    std::vector<Violation> out;

    std::map<std::string, int> id_count;
    for (const auto& n : t.nodes) ++id_count[n.id];
    for (const auto& [id, c] : id_count)
        if (c > 1) out.push_back({id, "duplicate node id"});

    int grandmasters = 0;
    for (const auto& n : t.nodes) {
        if (n.sync_class == SyncClass::Grandmaster) ++grandmasters;
        if (n.host) {
            const DeviceNode* h = t.find_node(*n.host);
            if (!h)
                out.push_back({n.id, "host references unknown node"});
            else if (h->kind != DeviceKind::EmbeddedComputer && h->kind != DeviceKind::Hpc)
                out.push_back({n.id, "host is not a compute node"});
        }
        if (n.sync_class == SyncClass::HostTimestamped && !n.host)
            out.push_back({n.id, "host-timestamped device without host"});
    }
    if (grandmasters != 1)
        out.push_back({"topology", "expected exactly one grandmaster, found " + std::to_string(grandmasters)});

    for (const auto& e : t.links) {
        if (e.node_a == e.node_b) out.push_back({link_key(e), "link endpoints identical"});
        if (!t.find_node(e.node_a)) out.push_back({link_key(e), "link endpoint unknown: " + e.node_a});
        if (!t.find_node(e.node_b)) out.push_back({link_key(e), "link endpoint unknown: " + e.node_b});
        if (!(e.capacity_bps > 0)) out.push_back({link_key(e), "link capacity must be positive"});
        if (e.prop_delay_s < 0) out.push_back({link_key(e), "negative propagation delay"});
    }

    /* Tree shape: the linked subgraph must be connected and acyclic, and
     * every node must sit either on a link or behind a host. */
    auto adj = detail::link_adjacency(t);
    std::size_t linked_nodes = 0;
    for (const auto& n : t.nodes)
        if (adj.count(n.id)) ++linked_nodes;
    if (linked_nodes > 0) {
        if (t.links.size() + 1 != linked_nodes) {
            out.push_back({"topology", "link graph is not a tree"});
        } else {
            // edge count matches a tree; connectivity check settles it
            std::map<std::string, bool> seen;
            std::queue<std::string> q;
            std::string start;
            for (const auto& n : t.nodes)
                if (adj.count(n.id)) { start = n.id; break; }
            q.push(start);
            seen[start] = true;
            while (!q.empty()) {
                std::string cur = q.front();
                q.pop();
                for (std::size_t li : adj[cur]) {
                    const auto& e = t.links[li];
                    const std::string& other = (e.node_a == cur) ? e.node_b : e.node_a;
                    if (!seen[other]) {
                        seen[other] = true;
                        q.push(other);
                    }
                }
            }
            std::size_t reached = 0;
            for (const auto& [id, s] : seen)
                if (s) ++reached;
            if (reached != linked_nodes) out.push_back({"topology", "link graph is not connected"});
        }
    }
    for (const auto& n : t.nodes)
        if (!adj.count(n.id) && !n.host) out.push_back({n.id, "node has neither a link nor a host"});

    return out;
}

/* One hop of a routed path. The edge is stored as declared in the topology;
 * toward_b records the traversal direction so that callers can accumulate
 * direction-dependent quantities (asymmetry). */
struct PathHop {
    LinkEdge edge;
    bool toward_b = true;

    double delay_s() const { return toward_b ? edge.delay_toward_b() : edge.delay_toward_a(); }

    friend bool operator==(const PathHop&, const PathHop&) = default;
};

/* Unique simple path from one linked device to another. Throws
 * std::invalid_argument for unknown ids and std::runtime_error when no path
 * exists (e.g. a camera, which has no Ethernet link of its own). */
inline std::vector<PathHop> path(const Topology& t, const std::string& from, const std::string& to) {
    if (!t.find_node(from)) throw std::invalid_argument("path: unknown node: " + from);
    if (!t.find_node(to)) throw std::invalid_argument("path: unknown node: " + to);
    if (from == to) return {};

    auto adj = detail::link_adjacency(t);
    std::map<std::string, std::pair<std::string, std::size_t>> parent;  // node -> (prev node, link idx)
    std::map<std::string, bool> seen;
    std::queue<std::string> q;
    q.push(from);
    seen[from] = true;
    while (!q.empty() && !seen[to]) {
        std::string cur = q.front();
        q.pop();
        auto it = adj.find(cur);
        if (it == adj.end()) continue;
        for (std::size_t li : it->second) {
            const auto& e = t.links[li];
            const std::string& other = (e.node_a == cur) ? e.node_b : e.node_a;
            if (!seen[other]) {
                seen[other] = true;
                parent[other] = {cur, li};
                q.push(other);
            }
        }
    }
    if (!seen[to]) throw std::runtime_error("path: no route from " + from + " to " + to);

    std::vector<PathHop> hops;
    std::string cur = to;
    while (cur != from) {
        auto [prev, li] = parent[cur];
        const auto& e = t.links[li];
        hops.push_back({e, e.node_b == cur});
        cur = prev;
    }
    std::reverse(hops.begin(), hops.end());
    return hops;
}

/* One-way propagation delay along the unique path, including per-link
 * asymmetry in the traversal direction. */
inline double one_way_delay_s(const Topology& t, const std::string& from, const std::string& to) {
    double d = 0.0;
    for (const auto& h : path(t, from, to)) d += h.delay_s();
    return d;
}

/* Ids of switch nodes strictly between the endpoints. */
inline std::vector<std::string> intermediate_switches(const Topology& t, const std::string& from,
                                                      const std::string& to) {
    auto hops = path(t, from, to);
    std::vector<std::string> out;
    for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
        const auto& h = hops[i];
        const std::string& node = h.toward_b ? h.edge.node_b : h.edge.node_a;
        const DeviceNode* n = t.find_node(node);
        if (n && n->kind == DeviceKind::Switch) out.push_back(node);
    }
    return out;
}

struct LinkUtilization {
    /* keyed by link_key(); utilization = routed bits per second / capacity */
    std::map<std::string, double> by_link;
    std::vector<std::string> oversubscribed;  // utilization > 1

    bool feasible() const { return oversubscribed.empty(); }
};

/* Route every demand along its unique path and accumulate load per link.
 * Utilization is additive in the demands. */
inline LinkUtilization link_utilization(const Topology& t, const std::vector<TrafficDemand>& demands) {
    std::map<std::string, double> load;
    for (const auto& d : demands) {
        for (const auto& h : path(t, d.source, d.sink)) load[link_key(h.edge)] += d.rate_bps;
    }
    LinkUtilization out;
    for (const auto& e : t.links) {
        double u = load[link_key(e)] / e.capacity_bps;
        out.by_link[link_key(e)] = u;
        if (u > 1.0) out.oversubscribed.push_back(link_key(e));
    }
    return out;
}

/* Reference vehicle network.
 *
 * Devices (29 nodes):
 *   core tier: core switch, hpc, ins (grandmaster), 5g router, v2x unit,
 *              cabin power controller, radar media switch, 5 radars
 *   roof tier: rooftop switch, 2 embedded computers, 4 rotating lidars,
 *              1 fmcw lidar, rooftop power controller
 *   host-attached: 8 cameras (4 per embedded computer)
 *
 * Defaults: fiber uplink 10 Gbit/s, copper access 1 Gbit/s, automotive
 * Ethernet 1 Gbit/s. The hpc access port is 10 Gbit/s so that aggregated
 * sensor recording fits. Propagation delays are nominal per-hop values;
 * the uplink edge is stored roof-side first, so a positive
 * delay_asymmetry_s means the roof-to-core direction is slower. */
inline Topology build_reference_topology() {
    Topology t;
    auto node = [&](std::string id, DeviceKind k, SyncClass s, std::optional<std::string> host,
                    std::string power_channel) {
        t.nodes.push_back({std::move(id), k, s, std::move(host), std::move(power_channel)});
    };

    node("hpc", DeviceKind::Hpc, SyncClass::PtpNative, {}, "c-ac-hpc");
    node("ins", DeviceKind::InsGrandmaster, SyncClass::Grandmaster, {}, "c-dc-ins");
    node("router-5g", DeviceKind::Router, SyncClass::NtpOnly, {}, "c-dc-router");
    node("v2x", DeviceKind::V2xUnit, SyncClass::PtpNative, {}, "c-dc-v2x");
    node("switch-core", DeviceKind::Switch, SyncClass::NtpOnly, {}, "c-ac-core-switch");
    node("switch-ae", DeviceKind::Switch, SyncClass::NtpOnly, {}, "c-dc-ae-switch");
    node("power-cabin", DeviceKind::PowerController, SyncClass::NtpOnly, {}, "c-dc-vehicle-if");
    node("switch-roof", DeviceKind::Switch, SyncClass::NtpOnly, {}, "r-dc-roof-switch");
    node("power-roof", DeviceKind::PowerController, SyncClass::NtpOnly, {}, "r-dc-roof-switch");
    node("orin-1", DeviceKind::EmbeddedComputer, SyncClass::PtpNative, {}, "r-dc-orin1");
    node("orin-2", DeviceKind::EmbeddedComputer, SyncClass::PtpNative, {}, "r-dc-orin2");

    for (const char* id : {"lidar-front-left", "lidar-front-right", "lidar-rear-left", "lidar-rear-right"})
        node(id, DeviceKind::Sensor, SyncClass::PtpNative, {}, "r-24-lidars");
    node("lidar-fmcw", DeviceKind::Sensor, SyncClass::NtpOnly, {}, "r-24-fmcw");

    for (const char* id : {"radar-front-center", "radar-front-left", "radar-front-right",
                           "radar-rear-left", "radar-rear-right"})
        node(id, DeviceKind::Sensor, SyncClass::HostTimestamped, "hpc", "c-dc-radars");

    for (const char* id : {"cam-front-center", "cam-front-left", "cam-front-right", "cam-mid-left"})
        node(id, DeviceKind::Sensor, SyncClass::HostTimestamped, "orin-1", "r-dc-cameras");
    for (const char* id : {"cam-mid-right", "cam-rear-center", "cam-rear-left", "cam-rear-right"})
        node(id, DeviceKind::Sensor, SyncClass::HostTimestamped, "orin-2", "r-dc-cameras");

    auto link = [&](std::string a, std::string b, LinkMedium m, double cap, double delay) {
        t.links.push_back({std::move(a), std::move(b), m, cap, delay, 0.0});
    };
    constexpr double kCopper1G = 1e9;
    constexpr double kCopper10G = 1e10;
    constexpr double kFiber10G = 1e10;
    constexpr double kHopDelay = 500e-9;  // nominal per-hop cable + phy delay

    link("switch-roof", "switch-core", LinkMedium::Fiber, kFiber10G, kHopDelay);
    link("hpc", "switch-core", LinkMedium::Copper, kCopper10G, kHopDelay);
    link("ins", "switch-core", LinkMedium::Copper, kCopper1G, kHopDelay);
    link("router-5g", "switch-core", LinkMedium::Copper, kCopper1G, kHopDelay);
    link("v2x", "switch-core", LinkMedium::Copper, kCopper1G, kHopDelay);
    link("power-cabin", "switch-core", LinkMedium::Copper, kCopper1G, kHopDelay);
    link("switch-ae", "switch-core", LinkMedium::Copper, kCopper1G, kHopDelay);
    for (const char* id : {"radar-front-center", "radar-front-left", "radar-front-right",
                           "radar-rear-left", "radar-rear-right"})
        link(id, "switch-ae", LinkMedium::AutomotiveEthernet, kCopper1G, kHopDelay);
    for (const char* id : {"lidar-front-left", "lidar-front-right", "lidar-rear-left", "lidar-rear-right"})
        link(id, "switch-roof", LinkMedium::Copper, kCopper1G, kHopDelay);
    link("lidar-fmcw", "switch-roof", LinkMedium::AutomotiveEthernet, kCopper1G, kHopDelay);
    link("orin-1", "switch-roof", LinkMedium::Copper, kCopper1G, kHopDelay);
    link("orin-2", "switch-roof", LinkMedium::Copper, kCopper1G, kHopDelay);
    link("power-roof", "switch-roof", LinkMedium::Copper, kCopper1G, kHopDelay);

    return t;
}

/* The steady recording load: the four rotating lidars stream to the hpc.
 * Fmcw frames, radar targets and camera streams either ride different
 * links or are negligible next to these; see sensor_data_rate() for the
 * per-sensor numbers. */
inline std::vector<TrafficDemand> reference_demands() {
    std::vector<TrafficDemand> d;
    constexpr double kRotatingLidarBps = 1024.0 * 128 * 20 * 12 * 8;  // 251 658 240
    for (const char* id : {"lidar-front-left", "lidar-front-right", "lidar-rear-left", "lidar-rear-right"})
        d.push_back({id, "hpc", kRotatingLidarBps});
    return d;
}

}  // namespace karlsim::topology

// Demo page logic: drives the wasm module, lays the graph out with a small
// deterministic force simulation, renders SVG, and wires up the explain /
// what-if interactions. No framework, no build step beyond wasm-pack.

import init, { analyze, explain, whatif, demo_input } from "./pkg/delegraph_wasm.js";

const WIDTH = 800;
const HEIGHT = 560;

const $ = (id) => document.getElementById(id);
const svgNS = "http://www.w3.org/2000/svg";

let state = null; // { input, beta, nodes, edges, report, positions }

function fmt(x) {
  if (typeof x === "string") return x; // exact p/q
  if (x === null || x === undefined) return "";
  return Math.abs(x - Math.round(x)) < 1e-9 ? String(Math.round(x)) : x.toFixed(3);
}

// Deterministic hash for initial positions, so layouts are reproducible.
function hash(s) {
  let h = 2166136261;
  for (let i = 0; i < s.length; i++) {
    h ^= s.charCodeAt(i);
    h = Math.imul(h, 16777619);
  }
  return (h >>> 0) / 4294967295;
}

function layout(nodes, edges) {
  const index = new Map(nodes.map((n, i) => [n.id, i]));
  const pos = nodes.map((n) => ({
    x: WIDTH * (0.15 + 0.7 * hash(n.id)),
    y: HEIGHT * (0.15 + 0.7 * hash(n.id + "#y")),
    vx: 0,
    vy: 0,
  }));
  const springs = edges.map((e) => [index.get(e.from), index.get(e.to)]);

  for (let iter = 0; iter < 300; iter++) {
    const t = 1 - iter / 300;
    // Pairwise repulsion.
    for (let i = 0; i < pos.length; i++) {
      for (let j = i + 1; j < pos.length; j++) {
        let dx = pos[i].x - pos[j].x;
        let dy = pos[i].y - pos[j].y;
        let d2 = dx * dx + dy * dy + 0.01;
        const f = 2600 / d2;
        const d = Math.sqrt(d2);
        dx /= d; dy /= d;
        pos[i].vx += dx * f; pos[i].vy += dy * f;
        pos[j].vx -= dx * f; pos[j].vy -= dy * f;
      }
    }
    // Springs along delegations.
    for (const [a, b] of springs) {
      const dx = pos[b].x - pos[a].x;
      const dy = pos[b].y - pos[a].y;
      const d = Math.sqrt(dx * dx + dy * dy) + 1e-9;
      const f = (d - 90) * 0.02;
      pos[a].vx += (dx / d) * f; pos[a].vy += (dy / d) * f;
      pos[b].vx -= (dx / d) * f; pos[b].vy -= (dy / d) * f;
    }
    // Gentle pull to the center, integrate, damp.
    for (const p of pos) {
      p.vx += (WIDTH / 2 - p.x) * 0.002;
      p.vy += (HEIGHT / 2 - p.y) * 0.002;
      p.x += p.vx * t;
      p.y += p.vy * t;
      p.vx *= 0.55;
      p.vy *= 0.55;
      p.x = Math.min(WIDTH - 30, Math.max(30, p.x));
      p.y = Math.min(HEIGHT - 24, Math.max(24, p.y));
    }
  }
  return pos;
}

function radius(node) {
  if (node.pruned) return 9;
  const votes = node.voter ? node.tally : 1;
  return 9 + 4 * Math.sqrt(Math.max(0, (votes ?? 1) - 1));
}

function nodeColor(node) {
  if (node.pruned) return "var(--pruned)";
  return node.voter ? "var(--voter)" : "var(--delegator)";
}

function el(tag, attrs, parent) {
  const e = document.createElementNS(svgNS, tag);
  for (const [k, v] of Object.entries(attrs)) e.setAttribute(k, v);
  parent.appendChild(e);
  return e;
}

function renderGraph(highlight = {}) {
  const svg = $("graph");
  svg.innerHTML = "";
  if (!state) return;
  const { nodes, edges, positions } = state;
  const index = new Map(nodes.map((n, i) => [n.id, i]));

  const defs = el("defs", {}, svg);
  for (const [name, color] of [["arrow", "#9db2c4"], ["arrow-hot", "#c96a2d"]]) {
    const m = el("marker", {
      id: name, viewBox: "0 0 10 10", refX: 10, refY: 5,
      markerWidth: 7, markerHeight: 7, orient: "auto-start-reverse",
    }, defs);
    el("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: color }, m);
  }

  for (const e of edges) {
    const a = positions[index.get(e.from)];
    const b = positions[index.get(e.to)];
    const dx = b.x - a.x, dy = b.y - a.y;
    const d = Math.sqrt(dx * dx + dy * dy) + 1e-9;
    const rB = radius(nodes[index.get(e.to)]) + 3;
    const x2 = b.x - (dx / d) * rB, y2 = b.y - (dy / d) * rB;
    const hot = highlight.edges && highlight.edges.has(e.from + "->" + e.to);
    el("line", {
      x1: a.x, y1: a.y, x2, y2,
      stroke: hot ? "#c96a2d" : "#9db2c4",
      "stroke-width": hot ? 2.4 : 1 + 1.6 * e.weight,
      "stroke-opacity": e.removed ? 0.25 : 0.8,
      "stroke-dasharray": e.removed ? "4 4" : "none",
      "marker-end": `url(#${hot ? "arrow-hot" : "arrow"})`,
    }, svg);
  }

  for (const n of nodes) {
    const p = positions[index.get(n.id)];
    const g = el("g", { cursor: "pointer" }, svg);
    const circle = el("circle", {
      cx: p.x, cy: p.y, r: radius(n),
      fill: nodeColor(n),
      stroke: highlight.node === n.id ? "#c96a2d" : "#44566a",
      "stroke-width": highlight.node === n.id ? 3 : 1.2,
    }, g);
    el("text", {
      x: p.x, y: p.y + 4, "text-anchor": "middle",
      "font-size": 11, "font-weight": 600, fill: "#1c2733",
      "pointer-events": "none",
    }, g).textContent = n.id;
    if (n.voter && n.tally !== undefined && n.tally !== null) {
      el("text", {
        x: p.x, y: p.y - radius(n) - 4, "text-anchor": "middle",
        "font-size": 10.5, fill: "#31586e", "pointer-events": "none",
      }, g).textContent = fmt(n.tally);
    }
    const title = el("title", {}, circle);
    title.textContent = n.pruned
      ? `${n.id}: pruned — this vote is wasted`
      : n.voter
        ? `${n.id}: votes, tally ${fmt(n.tally)}`
        : `${n.id}: delegates (raw S ${fmt(n.raw)})`;
    g.addEventListener("click", () => inspect(n));
  }
}

function renderSummary() {
  const r = state.report;
  const lines = [
    `<div class="stat">retained <b>${r.retained}</b>, wasted ` +
      `<b>${r.wasted_nodes.length ? r.wasted_nodes.join(", ") : "none"}</b></div>`,
    `<div class="stat">solver <b>${r.solver.method}</b>` +
      (r.solver.iterations ? ` (${r.solver.iterations} iterations)` : "") +
      `, residual <b>${r.solver.residual.toExponential(1)}</b></div>`,
    `<div class="stat">conservation: ${fmt(r.conservation_check.actual)} of ` +
      `${fmt(r.conservation_check.expected)} — <b>${r.conservation_check.pass ? "ok" : "FAILED"}</b></div>`,
  ];
  if (r.decay_loss > 0) {
    lines.push(`<div class="stat">decayed away: <b>${fmt(r.decay_loss)}</b> votes</div>`);
  }
  $("summary").innerHTML = lines.join("");

  const rows = Object.entries(r.voter_tallies)
    .sort((a, b) => b[1] - a[1])
    .map(([v, t]) => `<tr class="clickable" data-node="${v}"><td>${v}</td><td class="num">${fmt(t)}</td></tr>`)
    .join("");
  $("tallies").innerHTML =
    `<table><tr><th>voter</th><th class="num">votes</th></tr>${rows}</table>`;
  for (const tr of $("tallies").querySelectorAll("tr.clickable")) {
    tr.addEventListener("click", () => {
      const n = state.nodes.find((x) => x.id === tr.dataset.node);
      if (n) inspect(n);
    });
  }
}

function inspect(node) {
  // Use the snapshot the current render came from, not the live textarea.
  const { input, beta } = state;
  const detail = $("detail");
  try {
    if (node.pruned) {
      detail.innerHTML = `<h3>${node.id}</h3>
        <p class="hint">Pruned: no path to any voter, so this vote cannot be
        cast and is reported as wasted.</p>`;
      renderGraph({ node: node.id });
    } else if (node.voter) {
      const row = JSON.parse(explain(input, beta, node.id));
      const rows = Object.entries(row.contributions)
        .sort((a, b) => b[1] - a[1])
        .map(([src, v]) => `<tr><td>${src === node.id ? src + " (own vote)" : src}</td>` +
                           `<td class="num">${fmt(v)}</td></tr>`)
        .join("");
      detail.innerHTML = `<h3>${node.id} — ${fmt(row.total)} votes</h3>
        <table><tr><th>from</th><th class="num">votes</th></tr>${rows}</table>
        <p class="hint">Each row is this source's share of ${node.id}'s tally;
        routes are aggregated (exact paths can be infinitely long).</p>`;
      const hot = new Set();
      for (const e of state.edges) {
        if (!e.removed && e.to === node.id && row.contributions[e.from] !== undefined) {
          hot.add(e.from + "->" + e.to);
        }
      }
      renderGraph({ node: node.id, edges: hot });
    } else {
      const result = JSON.parse(whatif(input, beta, node.id));
      detail.innerHTML = `<h3>${node.id} — what if?</h3>
        <div class="stat">would receive <b>${fmt(result.votes)}</b> votes if they voted</div>
        <div class="stat">raw solver entry: <b>${fmt(node.raw)}</b></div>
        <p class="hint">The two differ on purpose: voting removes ${node.id}'s
        outgoing delegations, which reroutes the flow. The raw entry is not a
        prediction.</p>`;
      renderGraph({ node: node.id });
    }
  } catch (err) {
    detail.innerHTML = `<p class="hint">${String(err)}</p>`;
  }
}

function run() {
  const errBox = $("error");
  errBox.textContent = "";
  try {
    const input = $("input").value;
    const beta = parseFloat($("beta").value);
    const bundle = JSON.parse(analyze(input, beta));
    state = {
      input,
      beta,
      nodes: bundle.nodes,
      edges: bundle.edges,
      report: bundle.report,
      positions: layout(bundle.nodes, bundle.edges),
    };
    renderGraph();
    renderSummary();
    $("detail").innerHTML = `<p class="hint">Click a green node to see where its
      votes came from; click a blue node for its what-if tally.</p>`;
  } catch (err) {
    errBox.textContent = String(err);
  }
}

async function main() {
  await init();
  $("input").value = demo_input();
  $("run").addEventListener("click", run);
  $("beta").addEventListener("input", () => {
    $("beta-value").textContent = parseFloat($("beta").value).toFixed(2);
    run();
  });
  run();
}

main();

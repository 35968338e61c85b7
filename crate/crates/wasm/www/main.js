import init, { reliability_curve, explore_interference, calibrate } from "./pkg/qmeter_wasm.js";

const NS = "http://www.w3.org/2000/svg";
const $ = (id) => document.getElementById(id);

function el(tag, attrs, parent) {
  const node = document.createElementNS(NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  parent.appendChild(node);
  return node;
}

function guard(errId, fn) {
  try {
    $(errId).textContent = "";
    fn();
  } catch (e) {
    $(errId).textContent = String(e.message ?? e);
  }
}

const fmt = (x) => (typeof x === "number" ? x.toFixed(4) : String(x));

function drawCurve() {
  guard("curve-err", () => {
    const data = JSON.parse(reliability_curve(Number($("curve-points").value)));
    const svg = $("curve");
    svg.replaceChildren();
    const W = 640, H = 300, pad = 36;
    const x = (q) => pad + (q / 0.5) * (W - 2 * pad);
    const y = (v) => H - pad - v * (H - 2 * pad);
    el("line", { x1: pad, y1: y(0), x2: W - pad, y2: y(0), stroke: "#888" }, svg);
    el("line", { x1: pad, y1: y(0), x2: pad, y2: y(1), stroke: "#888" }, svg);
    for (const t of [0, 0.25, 0.5, 0.75, 1]) {
      el("text", { x: 4, y: y(t) + 4, "font-size": 11 }, svg).textContent = t;
    }
    for (const q of [0, 0.1, 0.2, 0.3, 0.4, 0.5]) {
      el("text", { x: x(q) - 8, y: H - pad + 16, "font-size": 11 }, svg).textContent = q;
    }
    el("text", { x: W - pad - 60, y: H - 6, "font-size": 12 }, svg).textContent = "crossover q";
    const series = [["reliability", "#1f77b4"], ["equivocation", "#d62728"], ["noise", "#2ca02c"]];
    for (const [key, color] of series) {
      const pts = data.q.map((q, i) => `${x(q)},${y(data[key][i])}`).join(" ");
      el("polyline", { points: pts, fill: "none", stroke: color, "stroke-width": 2 }, svg);
    }
  });
}

function drawInterference() {
  const q = Number($("int-q").value);
  const phi = Number($("int-phi").value);
  $("int-q-out").textContent = q.toFixed(3);
  $("int-phi-out").textContent = phi.toFixed(3);
  guard("int-err", () => {
    const d = JSON.parse(explore_interference(q, phi));
    const svg = $("bars");
    svg.replaceChildren();
    const H = 220, base = H - 30, scale = 170, bw = 50;
    d.quantum.forEach((p, j) => {
      const x0 = 60 + j * 170;
      el("rect", { x: x0, y: base - p * scale, width: bw, height: p * scale, fill: "#1f77b4" }, svg);
      const c = d.classical[j];
      el("rect", { x: x0 + bw + 6, y: base - c * scale, width: bw, height: c * scale, fill: "#ff7f0e" }, svg);
      el("text", { x: x0 + 30, y: H - 10, "font-size": 12 }, svg).textContent = `p${j}`;
    });
    el("text", { x: 420, y: 24, "font-size": 12, fill: "#1f77b4" }, svg).textContent = "■ quantum pointer statistics";
    el("text", { x: 420, y: 42, "font-size": 12, fill: "#ff7f0e" }, svg).textContent = "■ calibrated classical mixture";
    const ratios = d.mhi.ratios.map(fmt).join(", ");
    $("int-table").innerHTML =
      `<tr><th>interference gap</th><td>${fmt(d.gap)}</td></tr>` +
      `<tr><th>MHI ratios (δ = ${d.mhi.delta})</th><td>${ratios}</td></tr>` +
      `<tr><th>MHI reliable</th><td>${d.mhi.reliable}</td></tr>` +
      `<tr><th>pointer misalignment</th><td>${fmt(d.misalignment)}${d.degenerate ? " (degenerate)" : ""}</td></tr>`;
  });
}

function runCalibration() {
  guard("cal-err", () => {
    const d = JSON.parse(calibrate(Number($("cal-q").value), Number($("cal-shots").value), Number($("cal-seed").value)));
    let html = "<tr><th>input</th><th>output</th><th>exact</th><th>estimated</th></tr>";
    d.exact.forEach((row, k) =>
      row.forEach((p, j) => {
        html += `<tr><td>a${k}</td><td>p${j}</td><td>${fmt(p)}</td><td>${fmt(d.estimated[k][j])}</td></tr>`;
      })
    );
    html += `<tr><th colspan="3">max |error|</th><td>${fmt(d.max_abs_error)}</td></tr>`;
    $("cal-table").innerHTML = html;
  });
}

await init();
$("curve-points").addEventListener("change", drawCurve);
$("int-q").addEventListener("input", drawInterference);
$("int-phi").addEventListener("input", drawInterference);
$("cal-run").addEventListener("click", runCalibration);
drawCurve();
drawInterference();
runCalibration();

// Generated by `wasm-bindgen --target web --out-dir www/pkg`.
import init, { sharp_constant, sweep_alpha, regime_map } from "./pkg/khavinson_wasm.js";

const $ = (id) => document.getElementById(id);

function point() {
  return {
    geometry: $("geometry").value,
    n: Number($("n").value),
    q: $("q").value.trim(),
    position: Number($("position").value),
  };
}

// Runs `f`, printing a thrown error into `out` instead.
function guarded(out, f) {
  out.classList.remove("error");
  try {
    f();
  } catch (e) {
    out.classList.add("error");
    out.textContent = String(e.message ?? e);
  }
}

function drawSweep(pairs) {
  const canvas = $("plot");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 36;
  const values = pairs.map((p) => p[1]);
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (hi - lo < 1e-12 * Math.abs(hi)) {
    lo -= 0.5 * Math.abs(lo) || 0.5;
    hi += 0.5 * Math.abs(hi) || 0.5;
  }
  const x = (a) => pad + (a / Math.PI) * (w - 2 * pad);
  const y = (v) => h - pad - ((v - lo) / (hi - lo)) * (h - 2 * pad);
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.fillText("0", pad - 4, h - pad + 16);
  ctx.fillText("π", w - pad - 4, h - pad + 16);
  ctx.fillText(hi.toPrecision(6), 2, pad - 6);
  ctx.fillText(lo.toPrecision(6), 2, h - pad + 28);
  ctx.strokeStyle = "#1f5fa8";
  ctx.lineWidth = 2;
  ctx.beginPath();
  pairs.forEach(([a, v], i) => (i ? ctx.lineTo(x(a), y(v)) : ctx.moveTo(x(a), y(v))));
  ctx.stroke();
}

function runConstant() {
  const out = $("constant-out");
  guarded(out, () => {
    const p = point();
    const r = JSON.parse(sharp_constant(p.geometry, p.n, p.q, p.position));
    const dir = r.direction_alpha == null ? "" : `, attained at α = ${r.direction_alpha.toPrecision(6)}`;
    out.textContent = `C = ${r.value.toPrecision(15)} (${r.method}${dir})`;
  });
}

function runSweep() {
  const out = $("sweep-out");
  guarded(out, () => {
    const p = point();
    const t0 = performance.now();
    const pairs = JSON.parse(sweep_alpha(p.geometry, p.n, p.q, p.position, Number($("points").value)));
    drawSweep(pairs);
    const values = pairs.map((q) => q[1]);
    out.textContent = `min ${Math.min(...values).toPrecision(10)}, max ${Math.max(...values).toPrecision(10)}, ` +
      `${pairs.length} points in ${(performance.now() - t0).toFixed(0)} ms`;
  });
}

function runRegimes() {
  const out = $("regimes-out");
  guarded(out, () => {
    const list = JSON.parse(regime_map(Number($("n").value), Number($("qmax").value)));
    const rows = list.map((iv) => `<tr><td>${iv.notation}</td><td class="${iv.regime}">${iv.regime}</td></tr>`);
    out.innerHTML = `<table><tr><th>q</th><th>regime</th></tr>${rows.join("")}</table>`;
  });
}

function syncPositionLabel() {
  const ball = $("geometry").value === "ball";
  $("position-label").textContent = ball ? "ρ" : "xₙ";
  $("position").value = ball ? "0.5" : "1";
}

await init();
$("geometry").addEventListener("change", syncPositionLabel);
$("constant-run").addEventListener("click", runConstant);
$("sweep-run").addEventListener("click", runSweep);
$("regimes-run").addEventListener("click", runRegimes);
runConstant();
runRegimes();

import init, { probabilityCurve, cycleSignal, scalarTrajectory } from "./pkg/cycleswitch_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function axes(ctx, w, h, pad, [x0, x1], [y0, y1], yLabel) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad / 2, w - 1.5 * pad, h - 1.5 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(String(y1.toPrecision(3)), 2, pad / 2 + 10);
  ctx.fillText(String(y0.toPrecision(3)), 2, h - pad);
  ctx.fillText(String(x0), pad, h - 4);
  ctx.fillText(String(x1), w - pad, h - 4);
  ctx.fillText(yLabel, pad + 4, pad / 2 + 12);
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 1.5 * pad);
  const sy = (y) => h - pad - ((y - y0) / (y1 - y0 || 1)) * (h - 1.5 * pad);
  return { sx, sy };
}

function line(ctx, pts, color, step = false) {
  ctx.strokeStyle = color;
  ctx.beginPath();
  pts.forEach(([x, y], i) => {
    if (i === 0) ctx.moveTo(x, y);
    else if (step) { ctx.lineTo(x, pts[i - 1][1]); ctx.lineTo(x, y); }
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
}

function guard(info, f) {
  try {
    f();
  } catch (e) {
    $(info).innerHTML = `<span class="err">${e}</span>`;
  }
}

function runCurve() {
  guard("c-info", () => {
    const r = JSON.parse(probabilityCurve(num("c-n"), num("c-phi"), num("c-trials"), num("c-sweep"), num("c-seed")));
    const ns = r.rows.map((row) => row.n);
    const lo = Math.min(r.bound, ...r.rows.map((row) => row.empirical - 3 * row.std_error));
    const c = $("c-plot"), ctx = c.getContext("2d");
    const { sx, sy } = axes(ctx, c.width, c.height, 40, [Math.min(...ns), Math.max(...ns)], [Math.max(0, lo - 0.05), 1], "P(Γ < 0)");
    line(ctx, [[sx(ns[0]), sy(r.bound)], [sx(ns[ns.length - 1]), sy(r.bound)]], "#c33");
    ctx.fillStyle = "#236";
    for (const row of r.rows) ctx.fillRect(sx(row.n) - 2, sy(row.empirical) - 2, 4, 4);
    $("c-info").textContent =
      `${r.rows.length} lengths from ${r.detections} detections, ⌊Φ⌋ = ${r.phi_floor}, ` +
      `bound ${r.bound.toFixed(6)} (red); min empirical ${Math.min(...r.rows.map((row) => row.empirical)).toFixed(4)}`;
  });
}

function runSignal() {
  guard("s-info", () => {
    const r = JSON.parse(cycleSignal(num("s-n"), num("s-phi"), num("s-gseed"), num("s-wseed"), num("s-periods")));
    const c = $("s-plot"), ctx = c.getContext("2d");
    // y axis: position of the active vertex within the cycle
    const pos = new Map(r.cycle.map((v, k) => [v, k]));
    const { sx, sy } = axes(ctx, c.width, c.height, 40, [0, r.sigma.length - 1], [0, r.cycle.length - 1], "k in cycle");
    line(ctx, r.sigma.map((v, t) => [sx(t), sy(pos.get(v))]), "#236", true);
    $("s-info").textContent =
      `cycle (${r.cycle.length} vertices, ⌊Φ⌋ = ${r.phi_floor}): ${r.cycle.join(" → ")} → ${r.cycle[0]}; ` +
      `walk length ${r.walk.length}; period ${r.period}; Γ = ${r.gamma.toFixed(4)} ` +
      `(${r.contractive ? "contractive" : "not contractive"}); admissible: ${r.admissible}`;
  });
}

function runTrajectory() {
  guard("t-info", () => {
    const r = JSON.parse(scalarTrajectory($("t-gains").value, $("t-dwell").value, num("t-x0"), num("t-periods")));
    const logs = r.x.map((x) => Math.log10(Math.max(Math.abs(x), 1e-300)));
    const c = $("t-plot"), ctx = c.getContext("2d");
    const { sx, sy } = axes(ctx, c.width, c.height, 40, [0, r.x.length - 1], [Math.min(...logs), Math.max(...logs)], "log10 |x(t)|");
    line(ctx, logs.map((y, t) => [sx(t), sy(y)]), "#236");
    const ratio = r.ratio === null ? "undefined (x0 = 0)" : r.ratio.toPrecision(12);
    $("t-info").textContent =
      `period ${r.period}; Γ = ${r.gamma.toFixed(6)}; one-period V ratio ${ratio} vs exp(Γ) ${r.exp_gamma.toPrecision(12)}; ` +
      `|x(T)| = ${Math.abs(r.x[r.x.length - 1]).toExponential(3)}`;
  });
}

await init();
$("c-run").onclick = runCurve;
$("s-run").onclick = runSignal;
$("t-run").onclick = runTrajectory;
runSignal();
runTrajectory();

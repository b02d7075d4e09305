import init, { inspectCatalog, constructDesign, harmonicGrid } from "./pkg/sphdes_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function fmt(x) {
  return x === 0 ? "0" : x.toExponential(2);
}

function summary(r) {
  const lines = [`points: ${r.n}`, `strength: ${r.strength}`];
  r.residuals.forEach((v, i) => lines.push(`r_${i + 1} = ${fmt(v)}`));
  for (const o of r.orders) {
    lines.push(`d = ${o.d}: M = I ${o.identity ? "yes" : "no"} (max dev ${fmt(o.deviation)})`);
  }
  return lines;
}

function show(plot, report, fn) {
  try {
    const r = JSON.parse(fn());
    $(plot).innerHTML = r.svg;
    return r;
  } catch (e) {
    $(plot).innerHTML = "";
    $(report).innerHTML = `<span class="error">${e.message ?? e}</span>`;
    return null;
  }
}

function inspect() {
  const r = show("cat-plot", "cat-report", () =>
    inspectCatalog($("cat-name").value, num("cat-d"), $("cat-grid").checked));
  if (r) $("cat-report").textContent = [r.label ?? "", ...summary(r)].join("\n");
}

function construct() {
  $("con-report").textContent = "searching…";
  // let the status paint before the synchronous search blocks the page
  setTimeout(() => {
    const t0 = performance.now();
    const r = show("con-plot", "con-report", () =>
      constructDesign(num("con-t"), num("con-n"), num("con-starts"), num("con-seed"), $("con-grid").checked));
    if (!r) return;
    const ms = (performance.now() - t0).toFixed(0);
    $("con-report").textContent = [
      `converged: ${r.converged} (start ${r.start_index}, ${r.iterations} iterations, ${ms} ms)`,
      `A_t = ${fmt(r.residual)}`,
      `monomial check: ${fmt(r.oracle_deviation)}`,
      ...summary(r),
    ].join("\n");
  }, 20);
}

function colour(v, scale) {
  const s = Math.max(-1, Math.min(1, v / scale));
  const a = Math.round(255 * (1 - Math.abs(s)));
  return s >= 0 ? [255, a, a] : [a, a, 255];
}

function drawHarmonic() {
  const canvas = $("har-canvas");
  const { width, height } = canvas;
  let grid;
  try {
    grid = harmonicGrid(num("har-l"), num("har-m"), width, height);
    $("har-error").textContent = "";
  } catch (e) {
    $("har-error").textContent = e.message ?? String(e);
    return;
  }
  const scale = grid.reduce((m, v) => Math.max(m, Math.abs(v)), 0) || 1;
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(width, height);
  grid.forEach((v, i) => {
    const [r, g, b] = colour(v, scale);
    img.data.set([r, g, b, 255], 4 * i);
  });
  ctx.putImageData(img, 0, 0);
}

await init();
$("cat-go").addEventListener("click", inspect);
$("con-go").addEventListener("click", construct);
$("har-go").addEventListener("click", drawHarmonic);
inspect();
drawHarmonic();

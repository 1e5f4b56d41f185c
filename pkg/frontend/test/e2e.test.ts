/**
 * End-to-end: the UI controller driving the real stepping service.
 *
 * Spawns `haskelite serve` and talks to it over HTTP, exactly as the
 * browser client does.
 */

import { ChildProcess, spawn } from 'node:child_process'
import { afterAll, beforeAll, describe, expect, it } from 'vitest'

import { makeClient } from '../src/api.js'
import { PRESETS } from '../src/presets.js'
import { renderedTexts, traceLines } from '../src/render.js'
import { SessionController } from '../src/state.js'

const PORT = 8912 + (process.pid % 50)
const BASE = `http://127.0.0.1:${PORT}`

let server: ChildProcess

async function waitForService(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const r = await fetch(`${BASE}/sessions/probe/trace`)
      if (r.status === 404) return
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150))
  }
  throw new Error('stepping service did not come up')
}

beforeAll(async () => {
  server = spawn('haskelite', ['serve', '--port', String(PORT)], {
    stdio: 'ignore',
  })
  await waitForService()
})

afterAll(() => {
  server.kill()
})

const INSERT_JUSTIFICATIONS = [
  '3 <= 1 = False',
  'insert x (y:ys) | otherwise = y:insert x ys',
  '3 <= 2 = False',
  'insert x (y:ys) | otherwise = y:insert x ys',
  '3 <= 4 = True',
  'insert x (y:ys) | x<=y = x:y:ys',
  'final result',
]

describe('insert preset end to end', () => {
  it('step-to-end renders the classic trace byte-equal to the service', async () => {
    const client = makeClient(BASE)
    const controller = new SessionController(client)
    const preset = PRESETS.find((p) => p.name === 'insert')!
    controller.setProgram(preset.program)
    controller.setExpr(preset.expr)

    await controller.create()
    expect(controller.state.sessionId).not.toBeNull()
    expect(controller.state.entries[0].rendered).toBe('insert 3 [1, 2, 4]')

    await controller.stepToEnd()
    expect(controller.state.status).toBe('done')
    expect(controller.state.entries.map((e) => e.justification).slice(1)).toEqual(
      INSERT_JUSTIFICATIONS,
    )
    expect(controller.state.entries.at(-1)!.rendered).toBe('[1, 2, 3, 4]')

    // byte equality with what the service holds for this session
    const trace = await client.getTrace(controller.state.sessionId!)
    expect(controller.state.entries).toEqual(trace.entries)
    expect(renderedTexts(controller.state.entries)).toEqual(
      trace.entries.map((e) => e.rendered),
    )

    // and the pane layout mirrors the CLI's plain format
    const lines = traceLines(controller.state.entries).map((l) => l.text)
    expect(lines[0]).toBe('  insert 3 [1, 2, 4]')
    expect(lines[1]).toBe('  { 3 <= 1 = False }')
    expect(lines.at(-1)).toBe('= [1, 2, 3, 4]')
  })

  it('a type-incorrect edit shows the 422 diagnostic inline', async () => {
    const controller = new SessionController(makeClient(BASE))
    controller.setProgram('insert x [] = [x]\nbroken y = y + True\n')
    controller.setExpr('insert 3 [1,2,4]')
    await controller.create()
    expect(controller.state.sessionId).toBeNull()
    expect(controller.state.diagnostic).not.toBeNull()
    expect(controller.state.diagnostic!.kind).toBe('type')
    expect(controller.state.diagnostic!.message).toContain('cannot match')
    expect(controller.state.diagnostic!.line).toBe(2)
  })

  it('force resumes a session created without forcing', async () => {
    const client = makeClient(BASE)
    const controller = new SessionController(client)
    const preset = PRESETS.find((p) => p.name === 'insert')!
    // create directly with force off, as an advanced client would
    const created = await client.createSession(preset.program, preset.expr, {
      force: false,
    })
    controller.state = {
      ...controller.state,
      sessionId: created.id,
      entries: [created.entry],
      status: 'running',
      program: preset.program,
      expr: preset.expr,
    }
    await controller.stepToEnd()
    expect(controller.state.status).toBe('done')
    expect(controller.state.entries.at(-1)!.justification).not.toBe('final result')

    await controller.force()
    expect(controller.state.status).toBe('running')
    await controller.stepToEnd()
    expect(controller.state.entries.at(-1)!.justification).toBe('final result')
    expect(controller.state.entries.at(-1)!.rendered).toBe('[1, 2, 3, 4]')
  })
})

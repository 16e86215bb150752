from gliomaseg.pipeline.tool import run

run()

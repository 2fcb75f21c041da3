def execute_command(image):
    floor_patches = ImagePatch(image).find('floor')
    floor_patches.sort(key=lambda x: x.vertical_center)
    if len(floor_patches) < 2:
        return {'function': 'None', 'error': 'Image does not contain at least two floors.'}
    second_floor_patch = floor_patches[1]
    inputs = (second_floor_patch.horizontal_center, second_floor_patch.vertical_center)
    return {'function': 'navigate_to_object', 'inputs': inputs, 'box': [second_floor_patch.left, second_floor_patch.lower, second_floor_patch.right, second_floor_patch.upper]}
